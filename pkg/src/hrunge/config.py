"""Scenario configuration: JSON documents with region literals and a function catalog.

Numbers may be JSON numbers or strings holding decimals ("0.13") or
fractions ("1/128"). Complex numbers may also be written "a+bj" or [re, im].
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .blaschke import FiniteBlaschke
from .errors import ConfigError, HRungeError
from .geometry import PseudoDisk
from .regions import AnnulusSector, Complement, Disk, PointSet, PseudoDiskRegion, Union
from .runge import HullFunction, PlanConfig, VectorFunction

SCHEMA_VERSION = 1
KINDS = ("disk", "hull", "bidisk", "bidisk_entire")


def parse_real(x, what="number"):
    if isinstance(x, bool):
        raise ConfigError(f"{what}: expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return float(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"{what}: cannot parse {x!r} as a real number")


def parse_complex(x, what="complex number"):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"{what}: expected [re, im], got {x!r}")
        return complex(parse_real(x[0], what), parse_real(x[1], what))
    if isinstance(x, str):
        try:
            return complex(parse_real(x, what))
        except ConfigError:
            try:
                return complex(x.replace(" ", "").replace("i", "j"))
            except ValueError:
                raise ConfigError(f"{what}: cannot parse {x!r}") from None
    return complex(parse_real(x, what))


def _one_key(d, what):
    if not isinstance(d, dict) or len(d) != 1:
        raise ConfigError(f"{what}: expected an object with exactly one key, got {d!r}")
    return next(iter(d.items()))


def parse_region(lit, what="region"):
    kind, body = _one_key(lit, what)
    try:
        if kind == "disk":
            return Disk(parse_complex(body.get("center", 0)), parse_real(body["radius"]),
                        bool(body.get("closed", True)))
        if kind == "pseudodisk":
            return PseudoDiskRegion(PseudoDisk(parse_complex(body.get("center", 0)),
                                               parse_real(body["radius"])),
                                    bool(body.get("closed", True)))
        if kind == "annulus_sector":
            return AnnulusSector(parse_complex(body.get("center", 0)), parse_real(body["r_in"]),
                                 parse_real(body["r_out"]), parse_real(body.get("angle_lo", 0)),
                                 parse_real(body.get("angle_hi", 2 * np.pi)),
                                 bool(body.get("closed", True)))
        if kind == "points":
            return PointSet([parse_complex(p) for p in body])
        if kind == "union":
            return Union([parse_region(p, what) for p in body])
        if kind == "complement":
            within = parse_region(body["within"], what) if "within" in body else None
            return Complement(parse_region(body["of"], what), within)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ConfigError(f"{what}: malformed {kind} literal ({exc})") from None
    except HRungeError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{what}: {exc}") from None
    raise ConfigError(f"{what}: unknown region kind {kind!r}")


def region_to_json(lit):
    return lit


# -- function catalog --------------------------------------------------------


def _poly(coeffs):
    c = np.array(coeffs[::-1], dtype=complex)
    return lambda z: np.polyval(c, z)


def parse_scalar(lit, what="function"):
    """A scalar holomorphic function of one variable; returns (callable, poles)."""
    kind, body = _one_key(lit, what)
    try:
        if kind == "rational":
            poles = [parse_complex(p) for p in body["poles"]]
            coef = [parse_complex(c) for c in body.get("coefficients", [1] * len(poles))]
            const = parse_complex(body.get("constant", 0))
            if len(coef) != len(poles):
                raise ConfigError(f"{what}: {len(poles)} poles but {len(coef)} coefficients")
            P, C = np.array(poles), np.array(coef)

            def fn(z, P=P, C=C, const=const):
                z = np.asarray(z, dtype=complex)
                return const + np.sum(C / (z[..., None] - P), axis=-1)
            return fn, poles
        if kind == "polynomial":
            return _poly([parse_complex(c) for c in body["coefficients"]]), []
        if kind == "exp_poly":
            p = _poly([parse_complex(c) for c in body["coefficients"]])
            return (lambda z: np.exp(p(z))), []
        if kind == "scaled_coordinate":
            c = parse_complex(body.get("center", 0))
            s = parse_real(body["scale"])
            return (lambda z: (np.asarray(z) - c) / s), []
        if kind == "blaschke":
            B = FiniteBlaschke([parse_complex(a) for a in body["zeros"]])
            s = parse_real(body.get("scale", 1))
            return (lambda z: B.evaluate(np.asarray(z, dtype=complex)) / s), []
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{what}: malformed {kind} entry ({exc})") from None
    raise ConfigError(f"{what}: unknown catalog entry {kind!r}")


def _check_poles(poles, U, what, pitch=1 / 64):
    for p in poles:
        if abs(p) < 1 - 1e-12 and U.contains(np.array([p]))[0]:
            raise ConfigError(f"{what}: pole {p} lies in U")
        edge = U.boundary_samples(pitch)
        if edge.size and np.min(np.abs(edge - p)) <= pitch:
            raise ConfigError(f"{what}: pole {p} touches the closure of U")


def parse_function(lit, U, what="function"):
    """One-variable catalog entry (scalar or {"vector": [...]}) as a VectorFunction."""
    kind, body = _one_key(lit, what)
    entries = body if kind == "vector" else [lit]
    fns = []
    for k, e in enumerate(entries):
        fn, poles = parse_scalar(e, f"{what}[{k}]")
        _check_poles(poles, U, what)
        fns.append(fn)
    if len(fns) == 1:
        return VectorFunction(fns[0], 1, kind)
    return VectorFunction(lambda z: np.stack([f(z) for f in fns], axis=-1), len(fns), "vector")


def parse_bivariate(lit, U1, U2, what="function", pitch=1 / 32):
    """Two-variable catalog entry; returns (f(z1, z2) -> (..., m), m)."""
    kind, body = _one_key(lit, what)
    entries = body if kind == "vector" else [lit]
    fns = []
    for k, e in enumerate(entries):
        ek, eb = _one_key(e, what)
        try:
            if ek == "sum_rational":
                a, b, c = (parse_complex(eb[x]) for x in ("a", "b", "c"))
                coef = parse_complex(eb.get("coefficient", 1))
                s1 = np.concatenate([U1.sample(pitch), U1.boundary_samples(pitch)])
                s2 = np.concatenate([U2.sample(pitch), U2.boundary_samples(pitch)])
                lo = np.min(np.abs(a * s1[:, None] + b * s2[None, :] + c))
                if lo <= (abs(a) + abs(b)) * pitch:
                    raise ConfigError(f"{what}: singular set of the rational term meets U1 x U2")
                fns.append(lambda z1, z2, a=a, b=b, c=c, coef=coef: coef / (a * z1 + b * z2 + c))
            elif ek == "separable":
                g1, p1 = parse_scalar(eb["z1"], what)
                _check_poles(p1, U1, what)
                if eb.get("z2") is None:
                    fns.append(lambda z1, z2, g1=g1: g1(z1) + 0 * z2)
                else:
                    g2, p2 = parse_scalar(eb["z2"], what)
                    _check_poles(p2, U2, what)
                    fns.append(lambda z1, z2, g1=g1, g2=g2: g1(z1) * g2(z2))
            else:
                raise ConfigError(f"{what}: unknown bivariate entry {ek!r}")
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"{what}: malformed {ek} entry ({exc})") from None
    if len(fns) == 1:
        return fns[0], 1
    return (lambda z1, z2: np.stack([np.broadcast_to(f(z1, z2), np.broadcast(z1, z2).shape)
                                     for f in fns], axis=-1)), len(fns)


def parse_hulls(lits, what="hulls"):
    if not isinstance(lits, list) or not lits:
        raise ConfigError(f"{what}: expected a nonempty list")
    out = []
    for k, lit in enumerate(lits):
        fn, _ = parse_scalar(lit, f"{what}[{k}]")
        out.append(HullFunction(fn, name=_one_key(lit, what)[0]))
    return out


@dataclass
class Scenario:
    name: str
    kind: str
    K: object
    U: object
    function: object
    eps: list
    config: PlanConfig
    K2: object = None
    U2: object = None
    m: int = 1
    hulls: list = None
    hulls2: list = None
    eval_density: float = 1 / 32
    resolved: dict = field(default_factory=dict)


def load_scenario(source, pitch=None, eps=None, seed=None):
    """Parse a scenario from a path or a dict, applying command-line overrides."""
    if isinstance(source, dict):
        doc = source
    else:
        try:
            with open(source) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema {doc.get('schema')!r} (expected {SCHEMA_VERSION})")
    kind = doc.get("kind", "disk")
    if kind not in KINDS:
        raise ConfigError(f"unknown scenario kind {kind!r}")
    for key in ("K", "U", "function"):
        if key not in doc:
            raise ConfigError(f"missing required field {key!r}")
    K = parse_region(doc["K"], "K")
    U = parse_region(doc["U"], "U")
    num = {
        "margin": parse_real(doc.get("margin", 0.13), "margin"),
        "pitch": parse_real(pitch if pitch is not None else doc.get("pitch", "1/128"), "pitch"),
        "density": parse_real(doc.get("density", 0.01), "density"),
        "phase": parse_real(doc.get("phase", 0), "phase"),
        "sup_density": parse_real(doc.get("sup_density", "1/32"), "sup_density"),
    }
    probes = int(doc.get("probes", 16))
    seed = int(seed if seed is not None else doc.get("seed", 0))
    chain_density = doc.get("chain_density")
    cfg = PlanConfig(margin=num["margin"], pitch=num["pitch"], density=num["density"],
                     phase=num["phase"], probes=probes, seed=seed,
                     chain_density=None if chain_density is None else parse_real(chain_density),
                     sup_density=num["sup_density"])
    eps_src = eps if eps is not None else doc.get("eps", ["1/8"])
    eps_list = [parse_real(e, "eps") for e in eps_src]
    if not eps_list or any(not 0 < e < 1 for e in eps_list):
        raise ConfigError("every eps must lie in (0, 1)")
    sc = Scenario(str(doc.get("name", "scenario")), kind, K, U, None, eps_list, cfg,
                  eval_density=parse_real(doc.get("eval_density", "1/32"), "eval_density"))
    if kind in ("bidisk", "bidisk_entire"):
        sc.K2 = parse_region(doc["K2"], "K2") if "K2" in doc else K
        sc.U2 = parse_region(doc["U2"], "U2") if "U2" in doc else U
        sc.function, sc.m = parse_bivariate(doc["function"], U, sc.U2)
    else:
        sc.function = parse_function(doc["function"], U)
        sc.m = sc.function.m
    if kind in ("hull", "bidisk_entire"):
        if "hulls" not in doc:
            raise ConfigError(f"kind {kind!r} needs a 'hulls' list")
        sc.hulls = parse_hulls(doc["hulls"])
        sc.hulls2 = parse_hulls(doc["hulls2"], "hulls2") if "hulls2" in doc else sc.hulls
    sc.resolved = {
        "schema": SCHEMA_VERSION, "name": sc.name, "kind": kind,
        "K": doc["K"], "U": doc["U"], "K2": doc.get("K2"), "U2": doc.get("U2"),
        "function": doc["function"], "hulls": doc.get("hulls"), "hulls2": doc.get("hulls2"),
        "eps": eps_list, "margin": cfg.margin, "pitch": cfg.pitch, "density": cfg.density,
        "chain_density": None if cfg.auto_chain else cfg.chain_density,
        "phase": cfg.phase, "probes": probes, "seed": seed, "sup_density": cfg.sup_density,
        "eval_density": sc.eval_density, "m": sc.m,
    }
    return sc
