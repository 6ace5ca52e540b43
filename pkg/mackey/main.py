"""
Command-line entry point for the Mackey functor verification toolkit
Runs lattice, axiom, chain-sum and norm checks and prints a deterministic JSON report
"""

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator
from sympy import factorint

from mackey.abelian_snf import AdditiveInvariant, FinAbGroup, registered_invariants
from mackey.bley_boltje import moebius_identity_sum, verify_bley_boltje
from mackey.config import Config
from mackey.errors import InputError, MackeyError, PreconditionError, SizeCapError
from mackey.gmodule_cohomology import GModule, cohomology_mackey, fixed_point_mackey, gmodule_validate
from mackey.group_core import FiniteGroup, group_from_generators, is_cyclic, lattice_of
from mackey.lattice_moebius import hall_cross_check, is_ell_hypoelementary, is_hypoelementary, moebius_table
from mackey.mackey_core import opposite_mackey, verify_cohomological_mackey
from mackey.norm_split import run_norm_checks

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def setup_logging():
    """Setup logging configuration"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if Config.LOG_FILE:
        Path(Config.LOG_FILE).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(Config.LOG_FILE))

    logging.basicConfig(
        level=getattr(logging, Config.LOG_LEVEL.upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


logger = logging.getLogger(__name__)


class GroupSpec(BaseModel):
    """Permutation generators of a group: {"degree": k, "generators": [[...], ...]}"""

    degree: int = Field(ge=1)
    generators: List[List[int]] = Field(default_factory=list)

    def build(self) -> FiniteGroup:
        return group_from_generators(self.degree, self.generators)


class ModuleSpec(BaseModel):
    """Carrier invariant factors and one action matrix per group generator"""

    invariant_factors: List[int]
    generator_actions: List[List[List[int]]]

    @field_validator("invariant_factors")
    @classmethod
    def factors_at_least_two(cls, value: List[int]) -> List[int]:
        if any(d < 2 for d in value):
            raise ValueError("invariant factors must be at least 2")
        return value

    def build(self, group: FiniteGroup) -> GModule:
        return gmodule_validate(group, FinAbGroup(tuple(self.invariant_factors)), self.generator_actions)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def inputs_digest(inputs: dict) -> str:
    return hashlib.sha256(json.dumps(inputs, sort_keys=True, separators=(",", ":")).encode("utf-8")).hexdigest()


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise InputError(f"Malformed JSON in {path}: {e}")


def _report(command: str, inputs: dict, results: dict, passed: bool, witnesses: list) -> dict:
    return {
        "command": command,
        "inputs_digest": inputs_digest(inputs),
        "results": results,
        "passed": passed,
        "witnesses": witnesses,
    }


def cmd_lattice(args) -> dict:
    """Subgroup census, Möbius table and hypoelementary classification"""
    raw = _load_json(args.group)
    G = GroupSpec.model_validate(raw).build()
    lattice = lattice_of(G)
    primes = sorted(factorint(G.order))
    table = moebius_table(G)

    subgroups = []
    for i, S in enumerate(lattice.subgroups):
        subgroups.append({
            "index": i,
            "order": S.order,
            "elements": list(S.elements),
            "cyclic": is_cyclic(S),
            "hypoelementary": is_hypoelementary(G, S),
            "ell_hypoelementary": {str(p): is_ell_hypoelementary(G, S, p) for p in primes},
            "moebius_to_group": table(i, lattice.whole),
        })
    mismatches = hall_cross_check(G)
    row_sums = table.row_sums_vanish()
    results = {
        "order": G.order,
        "subgroup_count": len(lattice),
        "subgroups": subgroups,
        "moebius": [{"lower": u, "upper": h, "value": v} for (u, h), v in sorted(table.values.items())],
        "hall_cross_check": {"passed": not mismatches, "mismatches": mismatches},
        "row_sums_vanish": row_sums,
    }
    print(f"{len(lattice)} subgroups, μ(1, G) = {table(lattice.trivial, lattice.whole)}", file=sys.stderr)
    return _report("lattice", {"group": raw}, results, not mismatches and row_sums, mismatches)


def _build_functor(G: FiniteGroup, module: GModule, constructor: str, degree: int):
    if constructor == "cohomology":
        return cohomology_mackey(G, module, degree)
    return fixed_point_mackey(module)


def cmd_mackey_verify(args) -> dict:
    """Build a functor from a module and run the axiom suite"""
    raw_group, raw_module = _load_json(args.group), _load_json(args.module)
    G = GroupSpec.model_validate(raw_group).build()
    module = ModuleSpec.model_validate(raw_module).build(G)
    M = _build_functor(G, module, args.constructor, args.degree)

    reports = {"functor": verify_cohomological_mackey(M)}
    if args.opposite:
        reports["opposite"] = verify_cohomological_mackey(opposite_mackey(M))
    passed = all(r.passed for r in reports.values())
    witnesses = [dict(c.witness, functor=name, axiom=c.name)
                 for name, r in reports.items() for c in r.failures]

    results = {
        "constructor": args.constructor,
        "degree": args.degree if args.constructor == "cohomology" else None,
        "values": [str(v) for v in M.values],
        "axioms": {name: r.to_dict() for name, r in reports.items()},
    }
    inputs = {"group": raw_group, "module": raw_module, "constructor": args.constructor,
              "degree": args.degree, "opposite": args.opposite}
    print(f"Axioms {'pass' if passed else 'FAIL'} for {len(M.values)} subgroups", file=sys.stderr)
    return _report("mackey-verify", inputs, results, passed, witnesses)


def _select_subgroup(G: FiniteGroup, selector: str):
    lattice = lattice_of(G)
    if selector in ("G", "g"):
        return lattice.subgroups[lattice.whole]
    try:
        index = int(selector)
    except ValueError:
        raise InputError(f"Subgroup selector must be a lattice index or G, got {selector!r}")
    if not 0 <= index < len(lattice):
        raise InputError(f"Subgroup index {index} is outside 0..{len(lattice) - 1}")
    return lattice.subgroups[index]


def cmd_bley_boltje(args) -> dict:
    """Chain-sum verdict and Möbius identity sums for one subgroup"""
    raw_group, raw_module = _load_json(args.group), _load_json(args.module)
    G = GroupSpec.model_validate(raw_group).build()
    module = ModuleSpec.model_validate(raw_module).build(G)
    M = _build_functor(G, module, args.constructor, args.degree)
    H = _select_subgroup(G, args.subgroup)
    ell = None if args.integral else args.ell

    primes = [ell] if ell is not None else sorted(factorint(H.order))
    if args.invariant:
        invariants = [AdditiveInvariant(name) if name == "length" else AdditiveInvariant(name, p)
                      for name in args.invariant for p in ([None] if name == "length" else primes)]
    else:
        invariants = registered_invariants(primes)

    result = verify_bley_boltje(M, H, ell)
    sums = {m.label: moebius_identity_sum(M, H, m, ell) for m in invariants}
    expected = result.isomorphic and all(v == 0 for v in sums.values())
    passed = expected or not result.hypothesis_holds
    witnesses = [] if expected else [{"isomorphic": result.isomorphic,
                                      "nonzero_sums": {k: v for k, v in sums.items() if v}}]

    flag = None
    if not result.hypothesis_holds:
        flag = f"{ell}-hypoelementary" if ell is not None else "hypoelementary or infinite values"
    results = {"chain_sums": result.to_dict(), "moebius_sums": sums,
               "informational": not result.hypothesis_holds, "hypothesis_flag": flag}
    inputs = {"group": raw_group, "module": raw_module, "subgroup": args.subgroup, "ell": ell,
              "constructor": args.constructor, "degree": args.degree,
              "invariants": [m.label for m in invariants]}
    print(f"Chain sums {result.odd_sum} vs {result.even_sum}: "
          f"{'isomorphic' if result.isomorphic else 'different'}"
          f"{'' if result.hypothesis_holds else ' (hypothesis fails, informational)'}", file=sys.stderr)
    return _report("bley-boltje", inputs, results, passed, witnesses)


def cmd_norm_demo(args) -> dict:
    """Seeded split-norm property harness"""
    ranks = args.ranks if args.ranks is not None else [2] * args.degree
    if args.modulus < 0 or args.modulus == 1 or args.degree < 1:
        raise InputError("Need modulus 0 or at least 2, and degree at least 1")
    results = run_norm_checks(args.modulus, args.degree, ranks, seed=args.seed, trials=args.trials)
    witnesses = [dict(check=name, witness=c["witness"]) for name, c in results["checks"].items() if not c["passed"]]
    inputs = {"modulus": args.modulus, "degree": args.degree, "ranks": ranks, "seed": args.seed,
              "trials": results["trials"]}
    print(f"Norm rank {results['rank']}; checks {'pass' if results['passed'] else 'FAIL'}", file=sys.stderr)
    return _report("norm-demo", inputs, results, results["passed"], witnesses)


def cmd_config_check(args) -> dict:
    Config.validate()
    print("Configuration valid", file=sys.stderr)
    return _report("config-check", {}, Config.as_dict(), True, [])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Cohomological Mackey functor verification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    lattice = sub.add_parser("lattice", help="Subgroup lattice, Möbius function and hypoelementary census")
    lattice.add_argument("group", help="Group spec JSON file")
    lattice.set_defaults(handler=cmd_lattice)

    def functor_arguments(p):
        p.add_argument("group", help="Group spec JSON file")
        p.add_argument("module", help="Module spec JSON file")
        p.add_argument("--constructor", choices=["fixed-points", "cohomology"], default="fixed-points")
        p.add_argument("--degree", type=int, default=2, help="Cohomology degree (0, 1 or 2)")

    verify = sub.add_parser("mackey-verify", help="Run the axiom suite on a constructed functor")
    functor_arguments(verify)
    verify.add_argument("--opposite", action="store_true", help="Also verify the opposite functor")
    verify.set_defaults(handler=cmd_mackey_verify)

    chains = sub.add_parser("bley-boltje", help="Chain-sum isomorphism and Möbius identity sums")
    functor_arguments(chains)
    chains.add_argument("--subgroup", default="G", help="Lattice index of H, or G")
    variant = chains.add_mutually_exclusive_group(required=True)
    variant.add_argument("--ell", type=int, help="Prime for the ℓ-primary variant")
    variant.add_argument("--integral", action="store_true", help="Integral variant")
    chains.add_argument("--invariant", action="append", choices=["ell_rank", "ell_length", "length"],
                        help="Additive invariant (repeatable); defaults to all registered")
    chains.set_defaults(handler=cmd_bley_boltje)

    norm = sub.add_parser("norm-demo", help="Split norm functor property checks")
    norm.add_argument("--modulus", type=int, default=5)
    norm.add_argument("--degree", type=int, default=2)
    norm.add_argument("--ranks", type=lambda s: [int(x) for x in s.split(",") if x], default=None,
                      help="Comma-separated ranks, one per component")
    norm.add_argument("--seed", type=int, default=0)
    norm.add_argument("--trials", type=int, default=None)
    norm.set_defaults(handler=cmd_norm_demo)

    config = sub.add_parser("config-check", help="Validate configuration")
    config.set_defaults(handler=cmd_config_check)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()

    try:
        report = args.handler(args)
    except SizeCapError as e:
        print(canonical_json({"command": args.command, "error": str(e), "dimension": e.dimension,
                              "cap": e.cap, "passed": False}))
        print(f"Size cap exceeded: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, PreconditionError, ValidationError, ValueError) as e:
        print(canonical_json({"command": args.command, "error": str(e), "passed": False}))
        print(f"Input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except MackeyError as e:
        logger.error(f"Verification error: {e}")
        print(canonical_json({"command": args.command, "error": str(e), "passed": False}))
        return EXIT_FAILED
    except Exception as e:
        logger.error(f"Internal error: {e}")
        return EXIT_INTERNAL

    print(canonical_json(report))
    return EXIT_OK if report["passed"] else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
