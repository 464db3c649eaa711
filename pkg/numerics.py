"""Thread-private mpmath contexts and precision helpers.

mpmath keeps its working precision on the context object, so sharing the
module-level ``mpmath.mp`` between threads would let one computation change
the precision of another. Each thread gets its own context here.
"""

import threading
from contextlib import contextmanager

from mpmath.ctx_iv import MPIntervalContext
from mpmath.ctx_mp import MPContext

from config import Config

_local = threading.local()


def mp_context() -> MPContext:
    """Multiprecision context owned by the calling thread"""
    ctx = getattr(_local, "mp", None)
    if ctx is None:
        ctx = MPContext()
        ctx.prec = Config.WORKING_PRECISION_BITS
        _local.mp = ctx
    return ctx


def iv_context() -> MPIntervalContext:
    """Interval arithmetic context owned by the calling thread"""
    ctx = getattr(_local, "iv", None)
    if ctx is None:
        ctx = MPIntervalContext()
        ctx.prec = Config.WORKING_PRECISION_BITS
        _local.iv = ctx
    return ctx


@contextmanager
def interval_precision(bits: int):
    ctx = iv_context()
    saved = ctx.prec
    ctx.prec = bits
    try:
        yield ctx
    finally:
        ctx.prec = saved


def mantissa_bits(value) -> int:
    man = getattr(value, "man", None)
    if man is None:
        return 64
    return max(1, int(man).bit_length())


def to_mpf(value):
    """Convert a number or decimal string to an mpf.

    Ints, floats and mpfs are converted exactly; strings are read at 256 bits
    or the working precision, whichever is larger.
    """
    ctx = mp_context()
    if isinstance(value, str):
        with ctx.workprec(max(256, Config.WORKING_PRECISION_BITS)):
            return ctx.mpf(value)
    if isinstance(value, int):
        with ctx.workprec(max(64, value.bit_length() + 1)):
            return ctx.mpf(value)
    if isinstance(value, float):
        with ctx.workprec(64):
            return ctx.mpf(value)
    with ctx.workprec(max(64, mantissa_bits(value))):
        return ctx.mpf(value)


def bits_for_tol(tol) -> int:
    """Working precision that resolves ``tol`` with 64 guard bits"""
    ctx = mp_context()
    with ctx.workprec(64):
        needed = int(ctx.ceil(-ctx.log(ctx.mpf(tol), 2))) + 64
    return max(Config.WORKING_PRECISION_BITS, needed)


def bits_for_depth(beta, depth: int) -> int:
    """Precision for a digit recursion of ``depth`` steps.

    Each step multiplies the rounding error of the remainder by beta, so the
    recursion loses about log2(beta) bits per digit.
    """
    ctx = mp_context()
    with ctx.workprec(64):
        lost = int(ctx.ceil(depth * ctx.log(ctx.mpf(beta), 2)))
    return max(Config.WORKING_PRECISION_BITS, mantissa_bits(beta)) + lost + 64


def sig15(value) -> float:
    """Round to 15 significant digits for output"""
    return float(f"{float(value):.15g}")


def format_real(value) -> str:
    return f"{float(value):.15g}"
