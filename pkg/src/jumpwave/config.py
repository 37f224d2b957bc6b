"""JSON run configuration for the command-line tool.

Schema (all blocks except "model" and "contract" are optional):

    {
      "model": {
        "r": 0.08,
        "delta": 0.04,          # or "b" (cost of carry r - delta),
                                 # exactly one of the two
        "sigma": 0.2,
        "lambda": 2.5,          # optional, default 0
        "jump": {                # optional, default no jumps
          "variant": "constant" | "normal",
          "phi": 0.05,           # constant variant
          "mu_j": 0.05,          # normal variant
          "sigma_j": 0.03
        }
      },
      "contract": {
        "side": "call" | "put",
        "strike": 100.0,
        "barrier": {             # optional; omit for a vanilla option
          "level": 50.0,
          "direction": "up-and-out" | "down-and-out",
          "rebate": "zero" | "intrinsic-at-barrier"   # optional
        }
      },
      "scenario": {
        "spots": [100.0, 110.0],
        "maturities": [0.25, 0.75],
        "orders": [0, 1, 2, 3]   # optional, default [3]
      },
      "numerics": {              # optional engine overrides
        "fd_n_space": 801,
        "tree_steps": 5000
      },
      "output": {                # optional
        "format": "csv" | "json",
        "path": "out.csv"
      }
    }

Unknown keys anywhere are rejected so typos fail loudly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .european import BarrierSpec, OptionSpec
from .model import JumpSpec, ModelParams


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    side: str
    strike: float
    barrier: BarrierSpec | None
    spots: tuple[float, ...]
    maturities: tuple[float, ...]
    orders: tuple[int, ...]
    fd_n_space: int = 801
    tree_steps: int = 5000
    out_format: str = "csv"
    out_path: str | None = None

    def option_spec(self, maturity: float) -> OptionSpec:
        return OptionSpec(self.side, self.strike, maturity)


def _require_keys(block: dict, allowed: set[str], where: str) -> None:
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in {where} block"
        )


def _number(block: dict, key: str, where: str) -> float:
    if key not in block:
        raise ConfigError(f"missing required key {key!r} in {where} block")
    v = block[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{where}.{key} must be a number, got {v!r}")
    return float(v)


def _parse_model(block: dict) -> ModelParams:
    _require_keys(block, {"r", "delta", "b", "sigma", "lambda", "jump"},
                  "model")
    r = _number(block, "r", "model")
    if ("delta" in block) == ("b" in block):
        raise ConfigError(
            "model block must set exactly one of 'delta' and 'b'"
        )
    if "delta" in block:
        delta = _number(block, "delta", "model")
    else:
        delta = r - _number(block, "b", "model")
    sigma = _number(block, "sigma", "model")
    lam = _number(block, "lambda", "model") if "lambda" in block else 0.0
    jump = JumpSpec()
    if "jump" in block:
        jb = block["jump"]
        if not isinstance(jb, dict):
            raise ConfigError("model.jump must be an object")
        _require_keys(jb, {"variant", "phi", "mu_j", "sigma_j"},
                      "model.jump")
        variant = jb.get("variant")
        if variant == "constant":
            jump = JumpSpec("constant", phi=_number(jb, "phi", "model.jump"))
        elif variant == "normal":
            jump = JumpSpec("normal",
                            mu_j=_number(jb, "mu_j", "model.jump"),
                            sigma_j=_number(jb, "sigma_j", "model.jump"))
        else:
            raise ConfigError(
                f"model.jump.variant must be 'constant' or 'normal', "
                f"got {variant!r}"
            )
    try:
        return ModelParams(r=r, delta=delta, sigma=sigma, lam=lam, jump=jump)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_contract(block: dict) -> tuple[str, float, BarrierSpec | None]:
    _require_keys(block, {"side", "strike", "barrier"}, "contract")
    side = block.get("side")
    if side not in ("call", "put"):
        raise ConfigError(f"contract.side must be 'call' or 'put', "
                          f"got {side!r}")
    strike = _number(block, "strike", "contract")
    if strike <= 0.0:
        raise ConfigError("contract.strike must be positive")
    barrier = None
    if "barrier" in block:
        bb = block["barrier"]
        if not isinstance(bb, dict):
            raise ConfigError("contract.barrier must be an object")
        _require_keys(bb, {"level", "direction", "rebate"},
                      "contract.barrier")
        direction = bb.get("direction")
        if direction not in ("up-and-out", "down-and-out"):
            raise ConfigError(
                f"contract.barrier.direction must be 'up-and-out' or "
                f"'down-and-out', got {direction!r}"
            )
        rebate = bb.get("rebate", "zero")
        if rebate not in ("zero", "intrinsic-at-barrier"):
            raise ConfigError(
                f"contract.barrier.rebate must be 'zero' or "
                f"'intrinsic-at-barrier', got {rebate!r}"
            )
        barrier = BarrierSpec(
            level=_number(bb, "level", "contract.barrier"),
            direction=direction, rebate=rebate,
        )
    return side, strike, barrier


def _float_list(block: dict, key: str, where: str) -> tuple[float, ...]:
    v = block.get(key)
    if (not isinstance(v, list) or not v
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                       for x in v)):
        raise ConfigError(f"{where}.{key} must be a non-empty number list")
    return tuple(float(x) for x in v)


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("top level of the config must be an object")
    _require_keys(data, {"model", "contract", "scenario", "numerics",
                         "output"}, "top-level")
    for required in ("model", "contract", "scenario"):
        if required not in data:
            raise ConfigError(f"missing required block {required!r}")
    model = _parse_model(data["model"])
    side, strike, barrier = _parse_contract(data["contract"])

    sc = data["scenario"]
    _require_keys(sc, {"spots", "maturities", "orders"}, "scenario")
    spots = _float_list(sc, "spots", "scenario")
    maturities = _float_list(sc, "maturities", "scenario")
    if any(t <= 0.0 for t in maturities):
        raise ConfigError("scenario.maturities must be positive")
    orders: tuple[int, ...] = (3,)
    if "orders" in sc:
        ov = sc["orders"]
        if (not isinstance(ov, list) or not ov
                or not all(isinstance(n, int) and not isinstance(n, bool)
                           and 0 <= n <= 3 for n in ov)):
            raise ConfigError("scenario.orders must be a non-empty list "
                              "of integers in 0..3")
        orders = tuple(ov)

    fd_n_space, tree_steps = 801, 5000
    if "numerics" in data:
        nb = data["numerics"]
        _require_keys(nb, {"fd_n_space", "tree_steps"}, "numerics")
        if "fd_n_space" in nb:
            fd_n_space = int(_number(nb, "fd_n_space", "numerics"))
        if "tree_steps" in nb:
            tree_steps = int(_number(nb, "tree_steps", "numerics"))

    out_format, out_path = "csv", None
    if "output" in data:
        ob = data["output"]
        _require_keys(ob, {"format", "path"}, "output")
        out_format = ob.get("format", "csv")
        if out_format not in ("csv", "json"):
            raise ConfigError(f"output.format must be 'csv' or 'json', "
                              f"got {out_format!r}")
        out_path = ob.get("path")
        if out_path is not None and not isinstance(out_path, str):
            raise ConfigError("output.path must be a string")

    return RunConfig(
        model=model, side=side, strike=strike, barrier=barrier,
        spots=spots, maturities=maturities, orders=orders,
        fd_n_space=fd_n_space, tree_steps=tree_steps,
        out_format=out_format, out_path=out_path,
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: "
                          f"{exc}") from exc
    return parse_config(data)
