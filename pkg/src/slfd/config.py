"""Problem configuration: plain-text sections with key = value lines.

Sections are [problem], [mesh], [quadrature], [solve] and [output]; '#' and
';' start comments.  Command-line flags override file values, and the
effective configuration written next to the outputs re-reads to an identical
run.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, replace

from . import exprparse
from .errors import InvalidParameter


@dataclass(frozen=True)
class ProblemConfig:
    q_text: str = "x"
    breakpoints: tuple[float, ...] = ()
    N: int = 1
    rule: str = "midpoint"
    K: int = 350
    indices: tuple[int, ...] = (0,)
    rank: int = 10
    tol: float | None = None
    bisect_tol: float = 1e-13
    out_dir: str = "."
    reference: str = ""
    parallel: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise InvalidParameter("N must be >= 1")
        if self.K < 8:
            raise InvalidParameter("K must be >= 8")
        if self.rank < 0:
            raise InvalidParameter("rank must be >= 0")
        if not self.indices:
            raise InvalidParameter("at least one eigenvalue index is required")
        if any(n < 0 for n in self.indices):
            raise InvalidParameter("eigenvalue indices must be >= 0")
        if self.rule not in ("midpoint", "endpoint_average"):
            raise InvalidParameter(f"unknown coefficient rule {self.rule!r}")
        for bp in self.breakpoints:
            if not -1.0 < bp < 1.0:
                raise InvalidParameter(f"breakpoint {bp!r} outside (-1, 1)")
        if self.parallel < 1:
            raise InvalidParameter("parallel must be >= 1")


def _parse_breakpoints(text: str) -> tuple[float, ...]:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if piece:
            out.append(exprparse.evaluate(exprparse.parse(piece), 0.0))
    return tuple(out)


def _parse_indices(text: str) -> tuple[int, ...]:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if piece:
            out.append(int(piece))
    return tuple(out)


def load_config(path: str) -> ProblemConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    return _from_parser(parser)


def loads_config(text: str) -> ProblemConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_file(io.StringIO(text))
    return _from_parser(parser)


def _from_parser(parser: configparser.ConfigParser) -> ProblemConfig:
    try:
        kw = {}
        if parser.has_section("problem"):
            sec = parser["problem"]
            if "q" in sec:
                kw["q_text"] = sec["q"].strip()
            if "breakpoints" in sec:
                kw["breakpoints"] = _parse_breakpoints(sec["breakpoints"])
        if parser.has_section("mesh"):
            sec = parser["mesh"]
            if "n" in sec:
                kw["N"] = sec.getint("n")
            if "rule" in sec:
                kw["rule"] = sec["rule"].strip()
        if parser.has_section("quadrature"):
            sec = parser["quadrature"]
            if "k" in sec:
                kw["K"] = sec.getint("k")
        if parser.has_section("solve"):
            sec = parser["solve"]
            if "indices" in sec:
                kw["indices"] = _parse_indices(sec["indices"])
            if "rank" in sec:
                kw["rank"] = sec.getint("rank")
            if "tol" in sec and sec["tol"].strip():
                kw["tol"] = sec.getfloat("tol")
            if "bisect_tol" in sec:
                kw["bisect_tol"] = sec.getfloat("bisect_tol")
            if "parallel" in sec:
                kw["parallel"] = sec.getint("parallel")
        if parser.has_section("output"):
            sec = parser["output"]
            if "dir" in sec:
                kw["out_dir"] = sec["dir"].strip()
            if "reference" in sec:
                kw["reference"] = sec["reference"].strip()
        return ProblemConfig(**kw)
    except (ValueError, configparser.Error) as exc:
        raise InvalidParameter(f"bad configuration: {exc}") from exc


def dumps_config(cfg: ProblemConfig) -> str:
    lines = [
        "[problem]",
        f"q = {cfg.q_text}",
        "breakpoints = " + ", ".join(repr(b) for b in cfg.breakpoints),
        "",
        "[mesh]",
        f"n = {cfg.N}",
        f"rule = {cfg.rule}",
        "",
        "[quadrature]",
        f"k = {cfg.K}",
        "",
        "[solve]",
        "indices = " + ", ".join(str(n) for n in cfg.indices),
        f"rank = {cfg.rank}",
        f"tol = {'' if cfg.tol is None else repr(cfg.tol)}",
        f"bisect_tol = {cfg.bisect_tol!r}",
        f"parallel = {cfg.parallel}",
        "",
        "[output]",
        f"dir = {cfg.out_dir}",
        f"reference = {cfg.reference}",
        "",
    ]
    return "\n".join(lines)


def save_config(cfg: ProblemConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_config(cfg))


def apply_overrides(cfg: ProblemConfig, **overrides) -> ProblemConfig:
    """New config with the non-None overrides applied."""
    filtered = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **filtered) if filtered else cfg
