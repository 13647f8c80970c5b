/**
 * Client-side signing for mutation envelopes.
 *
 * Mirrors the service's canonical byte layouts exactly: the transaction
 * preimage that lands on-ledger and the request preimage
 * method || path || sha256(canonical body JSON) || nonce. Keys are
 * Ed25519 seeds pasted by the operator and held in memory only
 * (demo-grade key handling by design).
 */

import { bytesToHex, concat, hexToBytes, lengthPrefixed, u16be, u64be, utf8 } from "./hex.js";

const subtle = globalThis.crypto.subtle;

/** PKCS#8 wrapper for a raw Ed25519 seed (RFC 8410 layout). */
const PKCS8_PREFIX = hexToBytes("302e020100300506032b657004220420");

export interface SigningKey {
  publicHex: string;
  privateKey: CryptoKey;
}

export async function keyFromSeedHex(seedHex: string): Promise<SigningKey> {
  const seed = hexToBytes(seedHex.trim());
  if (seed.length !== 32) throw new Error("signing key seed must be 32 bytes of hex");
  const pkcs8 = concat(PKCS8_PREFIX, seed);
  const privateKey = await subtle.importKey("pkcs8", pkcs8 as BufferSource,
    "Ed25519", true, ["sign"]);
  // derive the raw 32-byte public key via the JWK export
  const jwk = await subtle.exportKey("jwk", await derivePublic(pkcs8));
  const publicRaw = base64UrlToBytes(jwk.x as string);
  return { publicHex: bytesToHex(publicRaw), privateKey };
}

async function derivePublic(pkcs8: Uint8Array): Promise<CryptoKey> {
  // importing the private key as extractable lets us read the public half
  const pair = await subtle.importKey("pkcs8", pkcs8 as BufferSource,
    "Ed25519", true, ["sign"]);
  const jwk = await subtle.exportKey("jwk", pair);
  delete jwk.d;
  jwk.key_ops = ["verify"];
  return subtle.importKey("jwk", jwk, "Ed25519", true, ["verify"]);
}

function base64UrlToBytes(b64url: string): Uint8Array {
  const b64 = b64url.replace(/-/g, "+").replace(/_/g, "/");
  const padded = b64 + "=".repeat((4 - (b64.length % 4)) % 4);
  const raw = atob(padded);
  return Uint8Array.from(raw, (c) => c.charCodeAt(0));
}

export async function sign(key: SigningKey, message: Uint8Array): Promise<Uint8Array> {
  const signature = await subtle.sign("Ed25519", key.privateKey,
    message as BufferSource);
  return new Uint8Array(signature);
}

export async function sha256(data: Uint8Array): Promise<Uint8Array> {
  return new Uint8Array(await subtle.digest("SHA-256", data as BufferSource));
}

/**
 * Canonical JSON identical to the server's: sorted keys, compact
 * separators, non-ASCII escaped as \\uXXXX.
 */
export function canonicalJson(value: unknown): string {
  return escapeNonAscii(stringifySorted(value));
}

function stringifySorted(value: unknown): string {
  if (value === null || typeof value === "number" || typeof value === "boolean") {
    return JSON.stringify(value);
  }
  if (typeof value === "string") return JSON.stringify(value);
  if (Array.isArray(value)) {
    return "[" + value.map(stringifySorted).join(",") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([k, v]) => JSON.stringify(k) + ":" + stringifySorted(v));
  return "{" + entries.join(",") + "}";
}

function escapeNonAscii(text: string): string {
  return text.replace(/[-￿]/g,
    (c) => "\\u" + c.charCodeAt(0).toString(16).padStart(4, "0"));
}

// --- transaction preimage ----------------------------------------------------

type ArgKind = "u64" | "text" | "digest" | "key";

const FUNCTION_SPECS: Record<string, { code: number; args: [string, ArgKind][] }> = {
  f12: {
    code: 0x0c,
    args: [["caseId", "u64"], ["type", "text"], ["description", "text"],
           ["status", "text"], ["hash", "digest"], ["timestampMs", "u64"]],
  },
};

export interface TxArgs {
  [name: string]: number | string;
}

function encodeArg(kind: ArgKind, value: number | string): Uint8Array {
  switch (kind) {
    case "u64":
      return u64be(value as number);
    case "text":
      return utf8(value as string);
    case "digest":
    case "key": {
      const raw = hexToBytes(value as string);
      if (raw.length !== 32) throw new Error("digest/key arguments must be 32 bytes");
      return raw;
    }
  }
}

/** functionCode || argCount || per arg: name || value || authorKey || timestampMs */
export function transactionPreimage(functionName: string, args: TxArgs,
                                    authorKeyHex: string, timestampMs: number): Uint8Array {
  const spec = FUNCTION_SPECS[functionName];
  if (!spec) throw new Error(`no client-side encoder for ${functionName}`);
  const parts: Uint8Array[] = [new Uint8Array([spec.code]), u16be(spec.args.length)];
  for (const [name, kind] of spec.args) {
    if (!(name in args)) throw new Error(`${functionName} missing argument ${name}`);
    parts.push(lengthPrefixed(utf8(name)));
    parts.push(lengthPrefixed(encodeArg(kind, args[name]!)));
  }
  const author = hexToBytes(authorKeyHex);
  if (author.length !== 32) throw new Error("author key must be 32 bytes");
  parts.push(author);
  parts.push(u64be(timestampMs));
  return concat(...parts);
}

/** len(method) || method || len(path) || path || sha256(body) || nonce */
export async function requestPreimage(method: string, path: string,
                                      bodyJson: string, nonce: number | bigint): Promise<Uint8Array> {
  const bodyDigest = await sha256(utf8(bodyJson));
  return concat(
    lengthPrefixed(utf8(method.toUpperCase())),
    lengthPrefixed(utf8(path)),
    bodyDigest,
    u64be(nonce),
  );
}

export interface SignedEnvelope {
  body: Record<string, unknown>;
  callerKey: string;
  nonce: number;
  signature: string;
}

/** Build the doubly-signed envelope for an f12 event submission. */
export async function buildEventEnvelope(key: SigningKey, path: string,
                                         args: TxArgs, timestampMs: number,
                                         nonce: number): Promise<SignedEnvelope> {
  // the event timestamp is both a declared f12 argument and the
  // transaction timestamp; callers supply it once
  const fullArgs = { ...args, timestampMs };
  const txPreimage = transactionPreimage("f12", fullArgs, key.publicHex, timestampMs);
  const txSignature = await sign(key, txPreimage);
  const body = {
    function: "f12",
    args: fullArgs,
    timestampMs,
    txSignature: bytesToHex(txSignature),
  };
  const envelopeSignature = await sign(
    key, await requestPreimage("POST", path, canonicalJson(body), nonce));
  return {
    body,
    callerKey: key.publicHex,
    nonce,
    signature: bytesToHex(envelopeSignature),
  };
}
