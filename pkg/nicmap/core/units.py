"""Binary size units and nanosecond time helpers. Simulation time is integer nanoseconds."""

KiB = 2 ** 10
MiB = 2 ** 20
GiB = 2 ** 30

NS_PER_S = 10 ** 9
NS_PER_MS = 10 ** 6


def ns_to_ms(value: int) -> float:
    return value / NS_PER_MS


def ns_to_s(value: int) -> float:
    return value / NS_PER_S
