"""Command line interface: ``memb <subcommand>``."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .cache import cached_table, load_group, save_group
from .characters import format_table
from .checks import character_identity, fixed_space_identity, modular_degree_inequality, net_check
from .groups import (ENUMERATION_BOUND, build_group, conjugacy_classes, enumerate_subgroups, exponent,
                     parse_subgroup, split_top_level)
from .harness import PROTOCOLS, cost_table, evaluate, make_protocol, vc_lower_bound


def _group(spec: str):
    if spec.endswith(".json") and Path(spec).exists():
        return load_group(spec)
    return build_group(spec)


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _epsilon(text: str | None):
    if text is None or text == "auto":
        return None
    return float(text)


def _emit(data, out: str | None):
    text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@click.group()
def main():
    """Subgroup-membership protocols over finite groups."""


@main.command("gen-group")
@click.option("--group", "spec", required=True, help="Group spec, e.g. S4, D8, Q8, Z2^4, Z2xZ2^3.")
@click.option("--out", default=None, help="Write the group JSON here.")
@click.option("--cache-dir", default=None, help="Also store the group in this cache directory.")
def gen_group(spec, out, cache_dir):
    """Build and validate a group; print a summary."""
    G = build_group(spec)
    G.check()
    if out:
        Path(out).write_text(json.dumps(G.to_json(), sort_keys=True))
    if cache_dir:
        save_group(G, cache_dir)
    info = {"group": G.label, "order": G.order, "digest": G.digest, "abelian": G.is_abelian,
            "exponent": exponent(G), "classes": len(conjugacy_classes(G)),
            "generators": [G.name(g) for g in G.generators]}
    if G.order <= ENUMERATION_BOUND:
        info["subgroups"] = len(enumerate_subgroups(G))
    click.echo(json.dumps(info, sort_keys=True, indent=2))


@main.command()
@click.option("--group", "spec", required=True)
@click.option("--cache-dir", default=None)
@click.option("--json", "as_json", is_flag=True, help="Print the table as JSON.")
def chartable(spec, cache_dir, as_json):
    """Print the certified character table."""
    table = cached_table(_group(spec), cache_dir)
    click.echo(json.dumps(table.to_json(), indent=2) if as_json else format_table(table))


@main.command()
@click.option("--group", "spec", default=None)
@click.option("--eq1", is_flag=True, help="Fixed-space identity over splitting fields.")
@click.option("--eq2", is_flag=True, help="Character identity for normal subgroups.")
@click.option("--appendix-ineq", is_flag=True, help="Modular degree inequality.")
@click.option("--net", is_flag=True, help="Sphere codec guarantee.")
@click.option("--p", "primes", default="5,7", help="Comma-separated primes.")
@click.option("--epsilon", default=None, help="Codec epsilon, or 'auto'.")
@click.option("--trials", default=10_000, show_default=True, help="Vectors per dimension for --net.")
@click.option("--seed", default=0, show_default=True)
@click.option("--cache-dir", default=None)
@click.option("--out", default=None)
def verify(spec, eq1, eq2, appendix_ineq, net, primes, epsilon, trials, seed, cache_dir, out):
    """Run identity and guarantee checks; exit status 1 if any fails."""
    if not (eq1 or eq2 or appendix_ineq or net):
        raise click.UsageError("choose at least one of --eq1 --eq2 --appendix-ineq --net")
    if (eq1 or eq2 or appendix_ineq) and not spec:
        raise click.UsageError("--group is required for --eq1, --eq2 and --appendix-ineq")
    G = _group(spec) if spec else None
    results = []
    if eq1:
        results.append(fixed_space_identity(G, _ints(primes), cache_dir))
    if eq2:
        results.append(character_identity(G, cache_dir))
    if appendix_ineq:
        results.append(modular_degree_inequality(G, _ints(primes)))
    if net:
        results.append(net_check(epsilon=_epsilon(epsilon), vectors=trials, seed=seed,
                                 order=G.order if G else None))
    for r in results:
        r.pop("seconds", None)
    _emit({"schema": 1, "results": results}, out)
    if not all(r["holds"] for r in results):
        sys.exit(1)


@main.command()
@click.option("--protocol", type=click.Choice(PROTOCOLS), default="norm", show_default=True)
@click.option("--group", "spec", required=True)
@click.option("--subgroup", default=None, help="e.g. 'gens=(1,2),(1,2,3)'.")
@click.option("--y", "y_text", default=None, help="Bob's element.")
@click.option("--p", type=int, default=None, help="Prime for modrep.")
@click.option("--k", type=int, default=None, help="Extension degree for modrep (default: splitting).")
@click.option("--epsilon", default="auto", show_default=True)
@click.option("--trials", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--plan", type=click.Choice(["exhaustive", "sampled"]), default="exhaustive", show_default=True)
@click.option("--samples", default=16, show_default=True, help="Pairs drawn by the sampled plan.")
@click.option("--amplify", "amplify_k", default=1, show_default=True)
@click.option("--out", default=None, help="report.json or report.csv")
@click.option("--cache-dir", default=None)
def run(protocol, spec, subgroup, y_text, p, k, epsilon, trials, seed, plan, samples, amplify_k, out, cache_dir):
    """Evaluate a protocol on one (H, y) pair or over a plan."""
    G = _group(spec)
    proto = make_protocol(protocol, G, p=p, k=k, epsilon=_epsilon(epsilon), amplify_k=amplify_k,
                          cache_dir=cache_dir)
    pairs = None
    if subgroup is not None or y_text is not None:
        if subgroup is None or y_text is None:
            raise click.UsageError("--subgroup and --y go together")
        H = parse_subgroup(G, subgroup)
        if not proto.admits(H):
            raise click.UsageError(f"{protocol} needs a normal subgroup; try norm-closure")
        pairs = [(H, G.element(y_text))]
    report = evaluate(proto, plan, trials=trials, seed=seed, samples=samples, pairs=pairs)
    if out:
        report.write(out)
        click.echo(json.dumps(report.summary, sort_keys=True, indent=2))
    else:
        click.echo(report.dumps(), nl=False)


@main.command()
@click.option("--protocol", type=click.Choice(PROTOCOLS), default="norm", show_default=True)
@click.option("--groups", "specs", default=None, help="Comma-separated group specs.")
@click.option("--family", default=None, help="Template with {n}, e.g. 'Z2^{n}' or 'Z2xZ2^{n}'.")
@click.option("--range", "rng_text", default="1..4", show_default=True, help="Range for {n}, e.g. 1..6.")
@click.option("--p", type=int, default=None)
@click.option("--epsilon", default="auto", show_default=True)
@click.option("--trials", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--cache-dir", default=None)
@click.option("--out", default=None)
def table(protocol, specs, family, rng_text, p, epsilon, trials, seed, cache_dir, out):
    """Observed worst-case bits against the protocol bound across groups."""
    if specs:
        groups = [build_group(s) for s in split_top_level(specs)]
    elif family:
        lo, hi = (int(x) for x in rng_text.split(".."))
        groups = [build_group(family.format(n=n)) for n in range(lo, hi + 1)]
    else:
        raise click.UsageError("give --groups or --family")
    rows = cost_table(protocol, groups, p=p, epsilon=_epsilon(epsilon), trials=trials, seed=seed,
                      cache_dir=cache_dir)
    _emit({"schema": 1, "protocol": protocol, "rows": rows}, out)


@main.command()
@click.option("--group", "spec", required=True)
@click.option("--out", default=None)
def lowerbound(spec, out):
    """gamma(G), its shattering witness and the one-way lower bound."""
    _emit({"schema": 1, **vc_lower_bound(_group(spec))}, out)


if __name__ == "__main__":
    main()
