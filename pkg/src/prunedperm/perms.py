"""Permutation families on ``[k]`` and a small textual descriptor grammar.

Every permutation is an immutable value object.  ``perm(j)`` evaluates a
single image, ``perm.table()`` materialises the whole map as a numpy
array (cached, read-only).

Descriptor grammar (used by the CLI)::

    brp:n=10          brp:10            bit reversal on 2**n points
    circ:k=32,c=7                       j + c mod k
    id:k=8                              identity (circular shift by 0)
    lcs:k=8,h=3                         h*j mod k, h odd
    qpp:k=2048,h=63,b=128               h*j + b*j**2 mod k (tabulated)
    flip:<desc>                         k - 1 - inner(j)
    block2d:s1=<desc>/s2=<desc>         2D block interleaver
    mstream:s0=<desc>/s1=<desc>/omega=[1,0]
    table:[3,1,7,2,5,8,6,4,0,9]         explicit bijection
    rand:k=16,seed=1                    seeded random table

Nested descriptors that themselves contain ``/`` or ``,`` can be wrapped in
parentheses, e.g. ``flip:(block2d:s1=brp:2/s2=brp:3)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import (
    MAX_ENUM_BITS,
    MAX_FAST_BITS,
    bit_count,
    check_index,
    check_int,
    check_power_of_two,
)

#: Tables (QPP, explicit, random) are only materialised up to this size.
MAX_TABLE = 1 << MAX_ENUM_BITS


@dataclass(frozen=True)
class PermSize:
    n: int

    def __post_init__(self):
        check_int(self.n, "n")
        if not 0 <= self.n <= MAX_FAST_BITS:
            raise ValueError(f"n={self.n} outside 0..{MAX_FAST_BITS}")

    @property
    def k(self):
        return 1 << self.n

    @classmethod
    def of(cls, k):
        return cls(bit_count(k))


# --------------------------------------------------------------------------
# scalar evaluators


def eval_brp(n, j):
    """Reverse the ``n``-bit representation of ``j``."""
    n = check_int(n, "n")
    if n < 0:
        raise ValueError("n must be non-negative")
    j = check_index(j, 1 << n)
    if n == 0:
        return 0
    return int(format(j, f"0{n}b")[::-1], 2)


def _brp(n, j):
    # unchecked hot-path version
    if n == 0:
        return 0
    return int(format(j, f"0{n}b")[::-1], 2)


def eval_split_brp(n, j):
    """Bit reversal through the one-bit split ``pi_n(j) = 2 pi_{n-1}(j) + [j >= k/2]``."""
    n = check_int(n, "n")
    if n < 1:
        raise ValueError("n must be >= 1")
    j = check_index(j, 1 << n)
    out = 0
    # unroll the recursion: each level contributes its top bit to the
    # lowest free position of the result
    for level in range(n, 0, -1):
        half = 1 << (level - 1)
        top = 1 if j >= half else 0
        out |= top << (n - level)
        j -= top * half
    return out


def brp_table(n):
    """All ``2**n`` bit reversals as an int64 array, built by doubling."""
    n = check_int(n, "n")
    if not 0 <= n <= MAX_ENUM_BITS:
        raise ValueError(f"table size 2**{n} exceeds 2**{MAX_ENUM_BITS}")
    out = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        out = np.concatenate((2 * out, 2 * out + 1))
    return out


def eval_circular(k, c, j):
    check_index(c, k, "c")
    check_index(j, k)
    return (j + c) % k


def eval_lcs(k, h, j):
    if check_int(h, "h") % 2 == 0:
        raise ValueError("LCS multiplier h must be odd")
    check_index(j, k)
    return (h * j) % k


def eval_flip(inner, j):
    return inner.k - 1 - inner(j)


def compose_block2d(s1, s2, k1, k2, x):
    """Image of ``x`` under the 2D block interleaver built from ``s1`` (size k1), ``s2`` (size k2)."""
    if s1.k != k1 or s2.k != k2:
        raise ValueError(f"component sizes ({s1.k}, {s2.k}) do not match ({k1}, {k2})")
    check_index(x, k1 * k2, "x")
    x1, x2 = divmod(x, k2)
    return s2(x2) * k1 + s1(x1)


def compose_mstream(sigmas, omega, m, x):
    """Image of ``x`` under an m-stream interleaver: ``pi(m x + j) = m sigma_{omega(j)}(x) + omega(j)``."""
    if len(sigmas) != m or len(omega) != m:
        raise ValueError("need exactly m constituent permutations and an omega of length m")
    if sorted(omega) != list(range(m)):
        raise ValueError("omega must be a permutation of range(m)")
    sub = sigmas[0].k
    if any(s.k != sub for s in sigmas):
        raise ValueError("constituent permutations must share one size")
    check_index(x, m * sub, "x")
    xs, j = divmod(x, m)
    w = omega[j]
    return m * sigmas[w](xs) + w


# --------------------------------------------------------------------------
# value objects


class Permutation:
    """Common behaviour: call, table, inverse, bijection check."""

    k: int

    def __call__(self, j):
        raise NotImplementedError

    @property
    def n(self):
        return bit_count(self.k)

    @property
    def is_power_of_two(self):
        return self.k > 0 and self.k & (self.k - 1) == 0

    def table(self):
        """Whole image as a read-only int64 array."""
        cache = self.__dict__.get("_table")
        if cache is None:
            if self.k > MAX_TABLE:
                raise ValueError(f"k={self.k} too large to tabulate (cap {MAX_TABLE})")
            cache = self._build_table()
            cache.setflags(write=False)
            object.__setattr__(self, "_table", cache)
        return cache

    def _build_table(self):
        return np.fromiter((self(j) for j in range(self.k)), dtype=np.int64, count=self.k)

    def inverse(self, y):
        """Pre-image of ``y``.  Subclasses with a cheap closed form override this."""
        inv = self.__dict__.get("_inv")
        if inv is None:
            inv = np.empty(self.k, dtype=np.int64)
            inv[self.table()] = np.arange(self.k, dtype=np.int64)
            object.__setattr__(self, "_inv", inv)
        return int(inv[y])

    def images(self, js):
        return [self(j) for j in js]


def _check_bijection(values, k):
    arr = np.asarray(values, dtype=np.int64)
    if arr.shape != (k,):
        return False
    if k == 0:
        return True
    if arr.min() < 0 or arr.max() >= k:
        return False
    return bool(np.all(np.bincount(arr, minlength=k) == 1))


@dataclass(frozen=True, eq=True)
class BitReversal(Permutation):
    nbits: int

    def __post_init__(self):
        check_power_of_two(1 << check_int(self.nbits, "n"), "k", min_bits=0)

    @property
    def k(self):
        return 1 << self.nbits

    @property
    def n(self):
        return self.nbits

    def __call__(self, j):
        return _brp(self.nbits, check_index(j, self.k))

    def _build_table(self):
        return brp_table(self.nbits)

    def inverse(self, y):
        return self(y)


@dataclass(frozen=True)
class Circular(Permutation):
    k: int
    c: int = 0

    def __post_init__(self):
        check_int(self.k, "k")
        if self.k < 1:
            raise ValueError("k must be positive")
        check_index(self.c, self.k, "c")

    def __call__(self, j):
        return (check_index(j, self.k) + self.c) % self.k

    def _build_table(self):
        return (np.arange(self.k, dtype=np.int64) + self.c) % self.k

    def inverse(self, y):
        return (check_index(y, self.k) - self.c) % self.k


@dataclass(frozen=True)
class LCS(Permutation):
    k: int
    h: int

    def __post_init__(self):
        check_power_of_two(self.k)
        if check_int(self.h, "h") % 2 == 0:
            raise ValueError(f"LCS multiplier h={self.h} is even, not a bijection on k={self.k}")

    def __call__(self, j):
        return (self.h * check_index(j, self.k)) % self.k

    def _build_table(self):
        j = np.arange(self.k, dtype=np.int64)
        return (j * (self.h % self.k)) % self.k

    def inverse(self, y):
        return (check_index(y, self.k) * pow(self.h, -1, self.k)) % self.k


@dataclass(frozen=True)
class Table(Permutation):
    """Explicit bijection.  Validated at construction; k need not be a power of two."""

    values: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if len(vals) > MAX_TABLE:
            raise ValueError(f"table longer than {MAX_TABLE}")
        if not _check_bijection(vals, len(vals)):
            raise ValueError("table is not a bijection on [k]")
        object.__setattr__(self, "values", vals)

    @property
    def k(self):
        return len(self.values)

    def __call__(self, j):
        return self.values[check_index(j, self.k)]

    def _build_table(self):
        return np.array(self.values, dtype=np.int64)

    @classmethod
    def from_array(cls, arr):
        return cls(tuple(np.asarray(arr).tolist()))

    @classmethod
    def random(cls, k, seed=0):
        rng = np.random.default_rng(seed)
        return cls.from_array(rng.permutation(k))


def QPP(k, h, b):
    """Quadratic permutation polynomial ``h j + b j**2 mod k``, stored as a Table."""
    check_power_of_two(k, max_bits=16)
    j = np.arange(k, dtype=object)
    vals = (h * j + b * j * j) % k
    try:
        return Table(tuple(int(v) for v in vals))
    except ValueError:
        raise ValueError(f"qpp(k={k}, h={h}, b={b}) is not a permutation") from None


@dataclass(frozen=True)
class Flip(Permutation):
    inner: Permutation

    @property
    def k(self):
        return self.inner.k

    def __call__(self, j):
        return self.k - 1 - self.inner(j)

    def _build_table(self):
        return self.k - 1 - self.inner.table()

    def inverse(self, y):
        return self.inner.inverse(self.k - 1 - check_index(y, self.k))


@dataclass(frozen=True)
class Block2D(Permutation):
    s1: Permutation
    s2: Permutation

    @property
    def k1(self):
        return self.s1.k

    @property
    def k2(self):
        return self.s2.k

    @property
    def k(self):
        return self.s1.k * self.s2.k

    def __call__(self, x):
        x1, x2 = divmod(check_index(x, self.k, "x"), self.k2)
        return self.s2(x2) * self.k1 + self.s1(x1)

    def _build_table(self):
        t1, t2 = self.s1.table(), self.s2.table()
        # row x1 of the output grid, column x2
        return (t2[None, :] * self.k1 + t1[:, None]).reshape(-1)

    def inverse(self, y):
        q, r = divmod(check_index(y, self.k), self.k1)
        return self.s1.inverse(r) * self.k2 + self.s2.inverse(q)


@dataclass(frozen=True)
class MStream(Permutation):
    sigmas: tuple
    omega: tuple

    def __post_init__(self):
        sig = tuple(self.sigmas)
        om = tuple(int(w) for w in self.omega)
        if len(sig) < 1 or len(om) != len(sig):
            raise ValueError("need one omega entry per stream")
        if sorted(om) != list(range(len(sig))):
            raise ValueError("omega must be a permutation of range(m)")
        if any(s.k != sig[0].k for s in sig):
            raise ValueError("all streams must have equal size")
        object.__setattr__(self, "sigmas", sig)
        object.__setattr__(self, "omega", om)

    @property
    def m(self):
        return len(self.sigmas)

    @property
    def k(self):
        return self.m * self.sigmas[0].k

    def __call__(self, x):
        return compose_mstream(self.sigmas, self.omega, self.m, x)

    def _build_table(self):
        m = self.m
        out = np.empty(self.k, dtype=np.int64)
        for j, w in enumerate(self.omega):
            out[j::m] = m * self.sigmas[w].table() + w
        return out


def validate_perm(p):
    """True iff ``p`` is a bijection on ``[p.k]``."""
    if p.k > MAX_TABLE:
        raise ValueError(f"validation capped at k={MAX_TABLE}")
    return _check_bijection(p.table(), p.k)


def flatten_brp(p):
    """Return ``n`` if ``p`` is a plain bit reversal, else None."""
    return p.nbits if isinstance(p, BitReversal) else None


# --------------------------------------------------------------------------
# descriptor parser


class DescriptorError(ValueError):
    def __init__(self, msg, text, pos):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.pos = pos


_OPEN = {"(": ")", "[": "]"}


def _split_top(text, sep, base, full):
    """Split on ``sep`` outside brackets, returning (piece, offset) pairs."""
    parts, depth, start = [], [], 0
    for i, ch in enumerate(text):
        if ch in _OPEN:
            depth.append(_OPEN[ch])
        elif ch in (")", "]"):
            if not depth or depth.pop() != ch:
                raise DescriptorError(f"unbalanced {ch!r}", full, base + i)
        elif ch == sep and not depth:
            parts.append((text[start:i], base + start))
            start = i + 1
    if depth:
        raise DescriptorError("unclosed bracket", full, base + len(text))
    parts.append((text[start:], base + start))
    return parts


def _kv(body, base, full, sep=","):
    out = {}
    for piece, off in _split_top(body, sep, base, full):
        if "=" not in piece:
            raise DescriptorError(f"expected key=value, got {piece!r}", full, off)
        key, val = piece.split("=", 1)
        out[key.strip()] = (val.strip(), off + len(key) + 1)
    return out


def _int(val, off, full):
    try:
        return int(val, 0)
    except ValueError:
        raise DescriptorError(f"expected integer, got {val!r}", full, off) from None


def _int_list(val, off, full):
    val = val.strip()
    if not (val.startswith("[") and val.endswith("]")):
        raise DescriptorError("expected [..] list", full, off)
    inner = val[1:-1].strip()
    if not inner:
        return []
    return [_int(x.strip(), off, full) for x in inner.split(",")]


def _need(kv, keys, off, full, kind):
    missing = [x for x in keys if x not in kv]
    if missing:
        raise DescriptorError(f"{kind} needs {', '.join(missing)}", full, off)
    extra = sorted(set(kv) - set(keys))
    if extra:
        raise DescriptorError(f"{kind} does not accept {', '.join(extra)}", full, off)


def _parse(text, base, full):
    stripped = text.strip()
    base += len(text) - len(text.lstrip())
    if stripped.startswith("(") and stripped.endswith(")"):
        return _parse(stripped[1:-1], base + 1, full)
    if ":" not in stripped:
        raise DescriptorError("expected kind:params", full, base)
    kind, body = stripped.split(":", 1)
    kind = kind.strip().lower()
    boff = base + len(kind) + 1
    try:
        if kind == "brp":
            if "=" in body:
                kv = _kv(body, boff, full)
                _need(kv, ["n"], boff, full, kind)
                return BitReversal(_int(*kv["n"], full))
            return BitReversal(_int(body.strip(), boff, full))
        if kind in ("circ", "id", "lcs", "qpp", "rand"):
            kv = _kv(body, boff, full)
            if kind == "circ":
                _need(kv, ["k", "c"], boff, full, kind)
                return Circular(_int(*kv["k"], full), _int(*kv["c"], full))
            if kind == "id":
                _need(kv, ["k"], boff, full, kind)
                return Circular(_int(*kv["k"], full), 0)
            if kind == "lcs":
                _need(kv, ["k", "h"], boff, full, kind)
                return LCS(_int(*kv["k"], full), _int(*kv["h"], full))
            if kind == "qpp":
                _need(kv, ["k", "h", "b"], boff, full, kind)
                return QPP(*(_int(*kv[x], full) for x in ("k", "h", "b")))
            kv.setdefault("seed", ("0", boff))
            _need(kv, ["k", "seed"], boff, full, kind)
            return Table.random(_int(*kv["k"], full), _int(*kv["seed"], full))
        if kind == "flip":
            return Flip(_parse(body, boff, full))
        if kind == "table":
            return Table(tuple(_int_list(body, boff, full)))
        if kind == "block2d":
            kv = _kv(body, boff, full, sep="/")
            _need(kv, ["s1", "s2"], boff, full, kind)
            return Block2D(_parse(*kv["s1"], full), _parse(*kv["s2"], full))
        if kind == "mstream":
            kv = _kv(body, boff, full, sep="/")
            if "omega" not in kv:
                raise DescriptorError("mstream needs omega=[..]", full, boff)
            omega = _int_list(*kv.pop("omega"), full)
            keys = [f"s{i}" for i in range(len(omega))]
            _need(kv, keys, boff, full, kind)
            return MStream(tuple(_parse(*kv[x], full) for x in keys), tuple(omega))
    except DescriptorError:
        raise
    except (ValueError, TypeError) as exc:
        raise DescriptorError(str(exc), full, boff) from None
    raise DescriptorError(f"unknown permutation kind {kind!r}", full, base)


def parse_perm(text: str) -> Permutation:
    """Build a permutation from a descriptor string such as ``brp:n=10``."""
    return _parse(text, 0, text)


def describe(p: Permutation) -> str:
    """Inverse of :func:`parse_perm` for the structured kinds."""
    if isinstance(p, BitReversal):
        return f"brp:n={p.nbits}"
    if isinstance(p, Circular):
        return f"circ:k={p.k},c={p.c}"
    if isinstance(p, LCS):
        return f"lcs:k={p.k},h={p.h}"
    if isinstance(p, Flip):
        return f"flip:({describe(p.inner)})"
    if isinstance(p, Block2D):
        return f"block2d:s1=({describe(p.s1)})/s2=({describe(p.s2)})"
    if isinstance(p, MStream):
        streams = "/".join(f"s{i}=({describe(s)})" for i, s in enumerate(p.sigmas))
        return f"mstream:{streams}/omega=[{','.join(map(str, p.omega))}]"
    return "table:[" + ",".join(map(str, p.table().tolist())) + "]"
