"""Alert hub fan-out: ordering, subscription points, overflow cutoff."""

from custodia.alerts import OVERFLOW, AlertHub
from custodia.state import AlertNotification


def alert(seq: int) -> AlertNotification:
    return AlertNotification(seq=seq, tx_id=bytes([seq % 256]) * 32,
                             function="f12", case_id=0)


def test_subscribers_see_ledger_order():
    hub = AlertHub(buffer_size=16)
    sub = hub.subscribe("sink-a")
    for n in range(5):
        hub.publish(alert(n))
    received = [sub.get(timeout=0.1).seq for _ in range(5)]
    assert received == [0, 1, 2, 3, 4]
    assert sub.get(timeout=0.02) is None


def test_subscription_starts_at_subscription_point():
    hub = AlertHub(buffer_size=16)
    hub.publish(alert(0))
    late = hub.subscribe("late")
    hub.publish(alert(1))
    assert late.get(timeout=0.1).seq == 1
    assert late.get(timeout=0.02) is None


def test_slow_consumer_cut_off_with_overflow_notice():
    hub = AlertHub(buffer_size=3)
    slow = hub.subscribe("slow")
    keeper = hub.subscribe("keeper")
    kept = []
    for n in range(5):                       # 2 past the slow buffer
        hub.publish(alert(n))
        received = keeper.get(timeout=0.1)   # keeper drains promptly
        if received is not None and received is not OVERFLOW:
            kept.append(received.seq)
    drained = []
    while True:
        item = slow.get(timeout=0.02)
        if item is None or item is OVERFLOW:
            break
        drained.append(item.seq)
    assert item is OVERFLOW
    assert slow.overflowed
    # oldest buffered alert was dropped to make room for the notice;
    # the notice tells the consumer to re-query state anyway
    assert drained == [1, 2]
    assert hub.subscriber_count() == 1       # slow sink was disconnected
    # the prompt subscriber is unaffected and keeps receiving
    hub.publish(alert(5))
    assert kept == [0, 1, 2, 3, 4]
    assert keeper.get(timeout=0.1).seq == 5


def test_unsubscribe_stops_delivery():
    hub = AlertHub(buffer_size=8)
    sub = hub.subscribe()
    sub.close()
    hub.publish(alert(0))
    assert hub.subscriber_count() == 0
    assert sub.get(timeout=0.02) is None
