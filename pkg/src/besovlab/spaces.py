"""Parameter bookkeeping and the window classifiers for truncation and
composition behaviour.

Every positive or negative claim is a strict-inequality parameter window
copied verbatim from one cited statement; a point covered by no statement
comes back "unknown" with an empty citation for that slot.  Citation tags
("Thm3.12(ii)", "Cor3.10", ...) are opaque machine-readable identifiers
that experiment reports print next to measured ratios.  There is no
interpolation or closure of the statement set: windows the source leaves
open stay unknown by design.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = [
    "SpaceParams",
    "SpaceError",
    "sigma",
    "sigma_pq",
    "sigma_r",
    "TruncationVerdict",
    "CompositionVerdict",
    "ScalerMeta",
    "truncation_verdict",
    "composition_verdict",
    "norm_window_flags",
]

INF = math.inf


class SpaceError(ValueError):
    """Invalid space parameters or an inconsistent verdict."""


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def sigma(n: int, p: float) -> float:
    """n (max(1/p, 1) - 1): regularity threshold of the scale."""
    if not p > 0:
        raise SpaceError("p must be positive")
    return n * (max(_inv(p), 1.0) - 1.0)


def sigma_pq(n: int, p: float, q: float) -> float:
    """n (max(1/p, 1/q, 1) - 1)."""
    if not (p > 0 and q > 0):
        raise SpaceError("p and q must be positive")
    return n * (max(_inv(p), _inv(q), 1.0) - 1.0)


def sigma_r(n: int, p: float, r: float) -> float:
    """n (max(1/p, 1/r) - 1/r)."""
    if not (p > 0 and r > 0):
        raise SpaceError("p and r must be positive")
    return n * (max(_inv(p), _inv(r)) - _inv(r))


@dataclass(frozen=True)
class SpaceParams:
    """(family, s, p, q, n) with the F-scale restriction p < inf."""

    family: str
    s: float
    p: float
    q: float
    n: int

    def __post_init__(self):
        if self.family not in ("B", "F"):
            raise SpaceError("family must be 'B' or 'F'")
        if not (self.p > 0 and self.q > 0):
            raise SpaceError("p and q must lie in (0, inf]")
        if self.family == "F" and math.isinf(self.p):
            raise SpaceError("the F scale requires p < inf here")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise SpaceError("dimension n must be an integer >= 1")
        if not math.isfinite(self.s):
            raise SpaceError("smoothness s must be finite")

    @property
    def inv_p(self) -> float:
        return _inv(self.p)

    @property
    def inv_q(self) -> float:
        return _inv(self.q)

    def label(self) -> str:
        def num(v):
            return "inf" if math.isinf(v) else f"{v:g}"
        return f"{self.family}:{num(self.s)}:{num(self.p)}:{num(self.q)}:{self.n}"

    @staticmethod
    def parse(text: str) -> "SpaceParams":
        """FAMILY:s:p:q:n with 'inf' allowed for p and q."""
        parts = text.split(":")
        if len(parts) != 5:
            raise SpaceError(f"space syntax is FAMILY:s:p:q:n, got {text!r}")
        fam = parts[0].upper()

        def num(token):
            return INF if token.strip().lower() in ("inf", "infinity") else float(token)
        try:
            return SpaceParams(fam, float(parts[1]), num(parts[2]), num(parts[3]), int(parts[4]))
        except ValueError as exc:
            raise SpaceError(f"bad space string {text!r}: {exc}") from exc


YES, NO, UNKNOWN = "yes", "no", "unknown"


class _Slots:
    """Accumulates per-slot yes/no claims with their citation tags and
    rejects contradictions at construction time."""

    def __init__(self, names):
        self.values = {k: UNKNOWN for k in names}
        self.citations: list[tuple[str, str]] = []

    def claim(self, slot: str, value: str, tag: str):
        cur = self.values[slot]
        if cur != UNKNOWN and cur != value:
            raise SpaceError(f"contradictory claims for slot {slot}: {cur} vs {value} ({tag})")
        self.values[slot] = value
        if (slot, tag) not in self.citations:
            self.citations.append((slot, tag))


@dataclass(frozen=True)
class TruncationVerdict:
    truncation: str
    strong: str
    perfect: str
    citations: tuple[tuple[str, str], ...]

    def __post_init__(self):
        order = {NO: 0, UNKNOWN: 1, YES: 2}
        # nesting: perfect => strong => truncation (unknown absorbs)
        if self.perfect == YES and self.strong != YES:
            raise SpaceError("perfect=yes requires strong=yes")
        if self.strong == YES and self.truncation != YES:
            raise SpaceError("strong=yes requires truncation=yes")
        if self.strong == NO and self.perfect == YES:
            raise SpaceError("strong=no contradicts perfect=yes")
        for v in (self.truncation, self.strong, self.perfect):
            if v not in order:
                raise SpaceError(f"bad verdict value {v!r}")

    def to_json(self) -> str:
        return json.dumps(
            {"truncation": self.truncation, "strong": self.strong,
             "perfect": self.perfect,
             "citations": [{"slot": s, "tag": t} for s, t in self.citations]},
            sort_keys=True,
        )


@dataclass(frozen=True)
class ScalerMeta:
    is_lipschitz_scaling: bool
    gprime_seminorm_finite: bool


@dataclass(frozen=True)
class CompositionVerdict:
    sublinear: str
    strong: str
    perfect: str
    requires_g_prime_seminorm: bool
    citations: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if self.perfect == YES and self.strong != YES:
            raise SpaceError("perfect=yes requires strong=yes")
        if self.strong == YES and self.sublinear != YES:
            raise SpaceError("strong=yes requires sublinear=yes")
        for v in (self.sublinear, self.strong, self.perfect):
            if v not in (YES, UNKNOWN):
                raise SpaceError(f"composition slots are yes/unknown, got {v!r}")

    def to_json(self) -> str:
        return json.dumps(
            {"sublinear": self.sublinear, "strong": self.strong,
             "perfect": self.perfect,
             "requires_g_prime_seminorm": self.requires_g_prime_seminorm,
             "citations": [{"slot": s, "tag": t} for s, t in self.citations]},
            sort_keys=True,
        )


def truncation_verdict(sp: SpaceParams) -> TruncationVerdict:
    """Classify (family, s, p, q, n) against the encoded statement windows.

    Positive windows (strict inequalities as printed):
      B truncation      sigma^n_p < s < 1 + 1/p                       Thm3.3(i)
      F truncation      sigma^n_{p,q} < s < 1 + 1/p, s != 1/p if p<=1 Thm3.3(ii)
      B perfect (n-dim) n/p < s < 1                                   Thm3.16(ii)
      B perfect (n=1)   1/p < s < 1 + min(1/p, 1)                     Thm3.12(ii)
      F perfect (n-dim) n max(1/p,1/q) < s < 1                        Thm3.18(ii)
      F perfect (n=1)   1<p<inf, 1<q, max(1/p,1/q) < s < 1            Thm3.14(ii)
      B strong (p=q)    max(1/p, sigma^n_p) < s < 1 + min(1/p, 1)     Thm3.16(iii)
      F strong          1<p<inf, 1<q, max(1/p,1/q) < s < 1            Thm3.18(iii)
    Negative windows (strong truncation fails):
      B                 p<inf, sigma^n_p < s <= 1/p                   Thm3.16(iv)
      F                 p<inf, sigma^n_p < s < 1/p                    Thm3.18(iv)
      both              p<inf, sigma^n_p < s < 1/p                    Cor3.10
      B, q=inf, s=1/p   p > (n-1)/n                                   Cor3.10
    Yes/no claims propagate along the nesting (perfect => strong =>
    truncation; strong=no => perfect=no) carrying their tags.
    """
    slots = _Slots(("truncation", "strong", "perfect"))
    s, p, q, n = sp.s, sp.p, sp.q, sp.n
    ip, iq = sp.inv_p, sp.inv_q
    sg = sigma(n, p)

    if sp.family == "B":
        if sg < s < 1.0 + ip:
            slots.claim("truncation", YES, "Thm3.3(i)")
            slots.claim("truncation", YES, "Thm3.16(i)")
            if n == 1:
                slots.claim("truncation", YES, "Thm3.12(i)")
        if n * ip < s < 1.0:
            slots.claim("perfect", YES, "Thm3.16(ii)")
        if n == 1 and ip < s < 1.0 + min(ip, 1.0):
            slots.claim("perfect", YES, "Thm3.12(ii)")
        if p == q and max(ip, sg) < s < 1.0 + min(ip, 1.0):
            slots.claim("strong", YES, "Thm3.16(iii)")
        if not math.isinf(p):
            if sg < s <= ip:
                slots.claim("strong", NO, "Thm3.16(iv)")
                if n == 1:
                    slots.claim("strong", NO, "Thm3.12(iii)")
                if s == ip:
                    slots.claim("strong", NO, "Rem3.17")
            if sg < s < ip:
                slots.claim("strong", NO, "Cor3.10")
                slots.claim("strong", NO, "Prop3.8")
            if s == ip and math.isinf(q) and sg < s:
                slots.claim("strong", NO, "Cor3.10")
    else:
        sgpq = sigma_pq(n, p, q)
        excluded = (p <= 1.0 and s == ip)
        if sgpq < s < 1.0 + ip and not excluded:
            slots.claim("truncation", YES, "Thm3.3(ii)")
            slots.claim("truncation", YES, "Thm3.18(i)")
            if n == 1:
                slots.claim("truncation", YES, "Thm3.14(i)")
        if n * max(ip, iq) < s < 1.0:
            slots.claim("perfect", YES, "Thm3.18(ii)")
            if n == 1 and 1.0 < p and 1.0 < q:
                slots.claim("perfect", YES, "Thm3.14(ii)")
        if 1.0 < p and 1.0 < q and max(ip, iq) < s < 1.0:
            slots.claim("strong", YES, "Thm3.18(iii)")
        if sg < s < ip:
            slots.claim("strong", NO, "Thm3.18(iv)")
            slots.claim("strong", NO, "Cor3.10")
            slots.claim("strong", NO, "Prop3.8")
            if n == 1:
                slots.claim("strong", NO, "Thm3.14(iii)")

    # nesting closure, tags carried from the source claims
    def tags_for(slot, value):
        return [t for sl, t in slots.citations if sl == slot] or ["nesting"]

    if slots.values["perfect"] == YES and slots.values["strong"] == UNKNOWN:
        for t in tags_for("perfect", YES):
            slots.claim("strong", YES, t)
    if slots.values["strong"] == YES and slots.values["truncation"] == UNKNOWN:
        for t in tags_for("strong", YES):
            slots.claim("truncation", YES, t)
    if slots.values["strong"] == NO and slots.values["perfect"] == UNKNOWN:
        for t in tags_for("strong", NO):
            slots.claim("perfect", NO, t)

    return TruncationVerdict(slots.values["truncation"], slots.values["strong"],
                             slots.values["perfect"], tuple(slots.citations))


def composition_verdict(sp: SpaceParams, meta: ScalerMeta) -> CompositionVerdict:
    """Classify the composition behaviour for a Lipschitz scaling function.

    Windows (meta.is_lipschitz_scaling required throughout; the s >= 1 side
    condition is wired to meta.gprime_seminorm_finite):
      perfect  B: n/p < s < 1                                   Thm4.3
               F: n max(1/p,1/q) < s < 1                        Thm4.3
               B, n=1: 1<p<=inf, 1/p < s < 1 + 1/p  [side]      Thm4.10
      strong   F: 1<p<inf, 1<q, max(1/p,1/q) < s < 1            Thm4.12(i)
               B, p=q: 1<p<=inf, 1/p < s < 1 + 1/p  [side]      Thm4.12(ii)
               B: 1<p<=inf, 0 < s < 1 + 1/p         [side]      Prop4.7
      sublin.  B: 1<p<inf, q>=1, 1 < s < 1 + 1/p, g' seminorm   Prop4.5
    Thm4.3/4.10/4.12 cover the distorted and the absolute-value composition
    alike; Prop4.7 covers only the distorted one, which is why it feeds the
    strong slot rather than the perfect slot.
    """
    slots = _Slots(("sublinear", "strong", "perfect"))
    s, p, q, n = sp.s, sp.p, sp.q, sp.n
    ip, iq = sp.inv_p, sp.inv_q
    requires = bool(sp.family == "B" and p > 1.0 and s >= 1.0 and s < 1.0 + ip)
    if not meta.is_lipschitz_scaling:
        return CompositionVerdict(UNKNOWN, UNKNOWN, UNKNOWN, False, ())

    side_ok = (s < 1.0) or meta.gprime_seminorm_finite
    if sp.family == "B":
        if n * ip < s < 1.0:
            slots.claim("perfect", YES, "Thm4.3")
        if n == 1 and p > 1.0 and ip < s < 1.0 + ip and side_ok:
            slots.claim("perfect", YES, "Thm4.10")
        if p == q and p > 1.0 and ip < s < 1.0 + ip and side_ok:
            slots.claim("strong", YES, "Thm4.12(ii)")
        if p > 1.0 and 0.0 < s < 1.0 + ip and side_ok:
            slots.claim("strong", YES, "Prop4.7")
        if 1.0 < p < INF and q >= 1.0 and 1.0 < s < 1.0 + ip and meta.gprime_seminorm_finite:
            slots.claim("sublinear", YES, "Prop4.5")
    else:
        if n * max(ip, iq) < s < 1.0:
            slots.claim("perfect", YES, "Thm4.3")
        if 1.0 < p < INF and 1.0 < q and max(ip, iq) < s < 1.0:
            slots.claim("strong", YES, "Thm4.12(i)")

    def tags_for(slot):
        return [t for sl, t in slots.citations if sl == slot] or ["nesting"]

    if slots.values["perfect"] == YES and slots.values["strong"] == UNKNOWN:
        for t in tags_for("perfect"):
            slots.claim("strong", YES, t)
    if slots.values["strong"] == YES and slots.values["sublinear"] == UNKNOWN:
        for t in tags_for("strong"):
            slots.claim("sublinear", YES, t)

    return CompositionVerdict(slots.values["sublinear"], slots.values["strong"],
                              slots.values["perfect"], requires, tuple(slots.citations))


def norm_window_flags(kind: str, sp: SpaceParams) -> dict:
    """Advisory in-window flags for the discrete norms.

    Norms stay computable outside their windows (the counterexample regimes
    live there); the flag only records whether the discrete characterization
    is backed by an equivalence at these parameters.
    """
    s, p, q, n = sp.s, sp.p, sp.q, sp.n
    ip, iq = sp.inv_p, sp.inv_q
    flags: dict[str, object] = {"kind": kind}
    if kind == "haar-seq":
        lo = max(n * (ip - 1.0), ip - 1.0)
        flags["in_window"] = lo < s < min(ip, 1.0)
        flags["window"] = "max(n(1/p-1), 1/p-1) < s < min(1/p, 1)"
    elif kind == "faber-b":
        flags["in_window"] = (n == 1) and ip < s < 1.0 + min(ip, 1.0)
        flags["window"] = "n=1, 1/p < s < 1 + min(1/p, 1)"
    elif kind == "faber-f":
        ok = (
            (p < INF and q < INF and max(ip, iq, 1.0) < s < 1.0 + min(ip, iq, 1.0))
            or (1.0 < p < INF and 1.0 < q < INF and s == 1.0)
            or (1.0 < p < INF and 1.0 < q and max(ip, iq) < s < 1.0)
        )
        flags["in_window"] = (n == 1) and ok
        flags["window"] = "n=1, three-case window around max(1/p,1/q) < s"
    elif kind == "osc-b":
        flags["in_window"] = n * ip < s < 1.0
        flags["window"] = "n/p < s < 1"
    elif kind == "osc-f":
        flags["in_window"] = n * max(ip, iq) < s < 1.0
        flags["window"] = "n max(1/p, 1/q) < s < 1"
    elif kind == "diff":
        flags["in_window"] = 0.0 < s < 2.0
        flags["window"] = "0 < s < order (dyadic-scale scan)"
    elif kind == "holder":
        flags["in_window"] = 0.0 < s < 1.0 and math.isinf(p) and math.isinf(q)
        flags["window"] = "0 < s < 1, p = q = inf"
    elif kind == "w1p":
        flags["in_window"] = 1.0 < p < INF
        flags["window"] = "1 < p < inf, s = 1"
    else:
        raise SpaceError(f"unknown norm kind {kind!r}")
    return flags
