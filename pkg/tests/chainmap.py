"""Independent parse of the log file layout for mutation tests.

Re-derives byte offsets from the documented format (magic, 4-byte record
lengths, block header, embedded transactions) without using the ledger's
own parser, so region attribution stays an independent oracle of the layout.
"""

MAGIC_LEN = 5


def record_regions(data: bytes):
    """Per record: (height, file byte range, per-tx region dicts)."""
    regions = []
    pos = MAGIC_LEN
    height = 0
    while pos < len(data):
        length = int.from_bytes(data[pos:pos + 4], "big")
        start = pos + 4
        tx_count = int.from_bytes(data[start + 48:start + 52], "big")
        cursor = start + 52 + 32 * tx_count
        tx_regions = []
        for _ in range(tx_count):
            pre_len = int.from_bytes(data[cursor:cursor + 4], "big")
            tx_regions.append({
                "len_prefix": range(cursor, cursor + 4),
                "preimage": range(cursor + 4, cursor + 4 + pre_len),
                "signature": range(cursor + 4 + pre_len, cursor + 4 + pre_len + 64),
            })
            cursor += 4 + pre_len + 64
        regions.append((height, range(pos, start + length), tx_regions))
        pos = start + length
        height += 1
    return regions


def height_of_byte(regions, pos: int) -> int:
    for height, byte_range, _ in regions:
        if pos in byte_range:
            return height
    raise AssertionError(f"byte {pos} is outside every record")
