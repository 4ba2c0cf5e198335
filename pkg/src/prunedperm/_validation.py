"""Small argument checks shared by every module."""

from numbers import Integral

#: Largest magnitude accepted for an exact intermediate (signed 128-bit).
INT128_MAX = (1 << 127) - 1

#: Fast paths evaluate on at most this many bits.
MAX_FAST_BITS = 63

#: Brute-force enumeration is capped at this many bits.
MAX_ENUM_BITS = 24


class ArithmeticOverflow(OverflowError):
    """An exact intermediate left the signed 128-bit range."""


class InexactDivision(ArithmeticError):
    """A quantity that must descale exactly left a remainder.

    This always signals a bug in a recursion, never bad input.
    """


def check_int(value, name):
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    return int(value)


def bit_count(k, name="k"):
    """Return ``n`` with ``k == 2**n``; raise for anything else."""
    k = check_int(k, name)
    if k < 1 or k & (k - 1):
        raise ValueError(f"{name} must be a positive power of two, got {k}")
    return k.bit_length() - 1


def check_power_of_two(k, name="k", min_bits=0, max_bits=MAX_FAST_BITS):
    n = bit_count(k, name)
    if n < min_bits or n > max_bits:
        raise ValueError(f"{name}=2**{n} outside supported range 2**{min_bits}..2**{max_bits}")
    return n


def check_index(j, k, name="j"):
    j = check_int(j, name)
    if not 0 <= j < k:
        raise ValueError(f"{name}={j} out of range [0, {k})")
    return j


def check_bound(x, k, name, allow_zero=True):
    """Bounds such as alpha and beta live in [0, k] (or (0, k])."""
    x = check_int(x, name)
    lo = 0 if allow_zero else 1
    if not lo <= x <= k:
        raise ValueError(f"{name}={x} out of range [{lo}, {k}]")
    return x


def checked(value):
    """Pass ``value`` through, refusing anything wider than signed 128 bits."""
    if not -INT128_MAX - 1 <= value <= INT128_MAX:
        raise ArithmeticOverflow(f"intermediate {value} exceeds signed 128-bit range")
    return value


def exact_div(num, den, what="value"):
    q, r = divmod(num, den)
    if r:
        raise InexactDivision(f"{what}: {num} is not divisible by {den}")
    return q
