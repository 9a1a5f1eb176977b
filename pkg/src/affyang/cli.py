"""Command-line driver for the verification suites.

Usage::

    affyang --suite psi --n 3
    affyang --suite diagram --n 4 --window 8 --mode both --out report.json
    affyang --config run.cfg          # flat ``key = value`` lines, same names as the flags
    affyang --list --n 3              # enumerate relation instances

The report is a JSON object with ``"schema": 1``, one entry per checked
item and a summary block.  The exit status is 1 if any item failed and 2
on a usage error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

SCHEMA = 1
SUITES = ("psi", "concl", "ope", "n-independence", "diagram", "all")
MODES = ("exact", "truncate", "both")
YANGIAN_SUITES = ("psi", "concl", "diagram")
PSI_RELATIONS = tuple(f"Eq2.{k}" for k in range(1, 11))
STATUSES = ("verified", "verified-with-assumption", "discrepancy", "failed")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int = 3
    suite: str = "all"
    window: int = 8
    mode: str = "both"
    out: str | None = None
    workers: int = 1

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        needs_three = self.suite in YANGIAN_SUITES or self.suite == "all"
        if needs_three and self.n < 3:
            raise UsageError("Yangian suites need n >= 3")
        if self.n < 2:
            raise UsageError("OPE suites need n >= 2")
        if self.window < 2:
            raise UsageError("window must be >= 2")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")


# -- suites ---------------------------------------------------------------------------------

def _psi_one(args):
    from .yangian import relations_minimalistic, verify_psi_relation

    n, name = args
    rel = next(r for r in relations_minimalistic(n) if r.name == name)
    return verify_psi_relation(rel).to_json() | {"name": name}


def _psi_status(status: str) -> str:
    if status == "verified":
        return "verified"
    if status.startswith("verified-with-assumption"):
        return "verified-with-assumption"
    return "failed"


def run_psi(cfg: RunConfig) -> list:
    from .yangian import relations_minimalistic

    names = [r.name for r in relations_minimalistic(cfg.n) if r.rel in PSI_RELATIONS]
    jobs = [(cfg.n, name) for name in names]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_psi_one, jobs))
    else:
        results = [_psi_one(j) for j in jobs]
    out = []
    for r in results:
        out.append({"suite": "psi", "id": f"psi:n={cfg.n}:{r['name']}",
                    "status": _psi_status(r["status"]), "detail": r})
    return out


def run_concl(cfg: RunConfig) -> list:
    from .sumcalc import verify_concl

    N = cfg.n + 1
    out = []
    for i in range(1, N):
        for j in range(1, N):
            rep = verify_concl(i, j, N, windows=(cfg.window,), mode=cfg.mode)
            status = "verified" if rep.status == "pass" else "failed"
            if cfg.mode == "both":
                exact_ok = rep.details.get("exact") == "zero"
                trunc_ok = rep.details.get(f"window {cfg.window}", "").endswith("boundary words")
                if exact_ok != trunc_ok:
                    status = "failed"
            out.append({"suite": "concl", "id": rep.id, "status": status, "detail": rep.to_json()})
    return out


def run_ope(cfg: RunConfig) -> list:
    from .voa import verify_tho1

    rep = verify_tho1(cfg.n)
    table = {"match": "verified", "discrepancy": "discrepancy"}
    out = []
    for e in rep.entries:
        key = ":".join(str(e.get(k, "")) for k in ("item", "left", "right", "s", "label"))
        out.append({"suite": "ope", "id": f"ope:n={cfg.n}:{key}",
                    "status": table.get(e["status"], "failed"), "detail": e})
    return out


def run_n_independence(cfg: RunConfig) -> list:
    from .voa import check_n_independence

    rep = check_n_independence((cfg.n, cfg.n + 1))
    return [{"suite": "n-independence", "id": f"n-independence:{cfg.n}-{cfg.n + 1}",
             "status": "verified" if rep.ok else "failed", "detail": rep.to_json()}]


def run_diagram(cfg: RunConfig) -> list:
    from .modealg import verify_diagram

    rep = verify_diagram(cfg.n, cfg.window, cfg.mode)
    return [{"suite": "diagram", "id": f"diagram:n={cfg.n}:{e['generator']}",
             "status": e["status"], "detail": e} for e in rep.entries]


RUNNERS = {
    "psi": run_psi,
    "concl": run_concl,
    "ope": run_ope,
    "n-independence": run_n_independence,
    "diagram": run_diagram,
}


def summarize(items: list) -> dict:
    out = {"total": len(items)}
    for s in STATUSES:
        out[s] = sum(1 for it in items if it["status"] == s)
    return out


def run(cfg: RunConfig) -> dict:
    """Execute the configured suite(s) and return the report object."""
    cfg.validate()
    suites = [s for s in SUITES if s != "all"] if cfg.suite == "all" else [cfg.suite]
    items = []
    for s in suites:
        items += RUNNERS[s](cfg)
    items.sort(key=lambda it: (it["suite"], it["id"]))
    config = {k: v for k, v in asdict(cfg).items() if k not in ("out", "workers")}
    return {"schema": SCHEMA, "config": config, "items": items, "summary": summarize(items)}


def list_instances(n: int) -> list:
    from .yangian import relations_minimalistic

    if n < 3:
        raise UsageError("Yangian relations need n >= 3")
    return [r.name for r in relations_minimalistic(n)]


# -- argument handling --------------------------------------------------------------------------

def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    with open(path) as fh:
        parser.read_string("[run]\n" + fh.read())
    return dict(parser["run"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="affyang", description="Run the verification suites.")
    p.add_argument("--config", help="flat key = value file mirroring the flags")
    p.add_argument("--n", type=int)
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--window", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--workers", type=int, help="processes for the psi suite")
    p.add_argument("--list", action="store_true", help="enumerate relation instances and exit")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        for key, raw in read_config(args.config).items():
            if key not in RunConfig.__dataclass_fields__:
                raise UsageError(f"unknown config key {key!r}")
            values[key] = int(raw) if key in ("n", "window", "workers") else raw
    for key in RunConfig.__dataclass_fields__:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.list:
            print("\n".join(list_instances(cfg.n)))
            return 0
        report = run(cfg)
    except UsageError as exc:
        print(f"affyang: error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    s = report["summary"]
    print(f"{s['total']} items: " + ", ".join(f"{k} {s[k]}" for k in STATUSES), file=sys.stderr)
    return 1 if s["failed"] else 0


if __name__ == "__main__":
    sys.exit(main())
