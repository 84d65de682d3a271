"""Model checking of universal temporal logics via stack-program interpretation."""

from ._core import check, encode, oracle, run, ts_roundtrip

__all__ = ["check", "encode", "oracle", "run", "ts_roundtrip"]
