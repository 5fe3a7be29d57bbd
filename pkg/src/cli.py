"""Interface de linha de comando do toolkit.

Códigos de saída: 0 sucesso, 1 violação de propriedade (rede que não ordena,
equivalência quebrada, netlist divergente), 2 erro de uso ou de leitura.
"""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from src import __version__
from src.config import Settings, get_settings
from src.cost import (
    DendriteDesign,
    default_networks,
    is_power_of_two,
    design_gates,
    make_design,
    plot_data_csv,
    rank_designs,
    selector_gates,
    selector_sweep,
    to_csv,
    to_json,
)
from src.emit import build_netlist, interpret_netlist, output_value, parse_netlist, render_netlist
from src.errors import ConfigurationError, ToolkitError
from src.ledger import RunLedger, RunManifest, file_digest
from src.neuron import (
    DendriteKind,
    NeuronConfig,
    compare_designs,
    default_network,
    dendrite_increments,
    simulate_many,
)
from src.sortnet import (
    SortingNetwork,
    all_binary_inputs,
    dump_network,
    eval_bits,
    gen_bitonic,
    is_index,
    load_bundled,
    load_network,
    validate_sorter,
)
from src.topk import counts_json, dump_selector, eval_topk, prune_topk
from src.volleys import DISTRIBUTIONS, dump_volleys, generate_volleys, load_volleys

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

KIND_CHOICES = [kind.value for kind in DendriteKind]


class Outputs:
    """Arquivos gravados por um comando, relativos a --out."""

    def __init__(self, out_dir: str):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.names: List[str] = []

    def write(self, name: str, text: str) -> Path:
        path = self.dir / name
        path.write_text(text, encoding="utf-8", newline="\n")
        self.names.append(name)
        return path


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"func", "command", "out", "no_ledger", "verbose"}
    return {key: value for key, value in sorted(vars(args).items()) if key not in skip}


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ToolkitError(f"Não foi possível ler {path}: {e}")


def _network_arg(value: str, n: Optional[int] = None) -> Tuple[SortingNetwork, str]:
    """
    Resolve --net: caminho de arquivo, `bitonic:N`, `bundled:N` ou, com --n,
    apenas `bitonic`/`bundled`.

    Returns:
        (rede, digest da entrada)
    """
    family, _, width = value.partition(":")
    if family in ("bitonic", "bundled") and not Path(value).exists():
        if width:
            if not is_index(width):
                raise ToolkitError(f"Largura inválida em --net {value!r}")
            n = int(width)
        if n is None:
            raise ToolkitError(f"--net {family} exige a largura (use {family}:N ou --n)")
        net = gen_bitonic(n) if family == "bitonic" else load_bundled(n)
        return net, net.digest
    return load_network(_read_text(value)), file_digest(value)


def _neuron_network(value: Optional[str]) -> str:
    if not value:
        return "auto"
    family = value.partition(":")[0]
    if family in ("auto", "bitonic", "bundled") and not Path(value).exists():
        return family
    return value


def _json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Comandos
# ---------------------------------------------------------------------------

def cmd_gen(args: argparse.Namespace, settings: Settings, out: Outputs) -> Tuple[int, RunManifest]:
    if args.family == "bitonic":
        net = gen_bitonic(args.width)
    else:
        net = load_bundled(args.width)
    out.write(f"sorter_{args.family}_{args.width}.net", dump_network(net))
    print(f"✓ Rede {net.origin.value} com {net.n} fios: {net.size} unidades, profundidade {net.depth}")
    return EXIT_OK, RunManifest(command="gen", parameters=_parameters(args), outputs=out.names)


def cmd_prune(args: argparse.Namespace, settings: Settings, out: Outputs) -> Tuple[int, RunManifest]:
    net, digest = _network_arg(args.net, args.n)
    if args.k is None:
        raise ToolkitError("prune exige --k")
    sel = prune_topk(net, args.k)
    for note in sel.provenance:
        logger.debug("Seletor: %s", note)
    out.write("selector.txt", dump_selector(sel))
    out.write("counts.json", counts_json(sel) + "\n")
    print(f"✓ top-{sel.k} de {net.n} fios: total {sel.source_total}, "
          f"obrigatórias {len(sel.mandatory)}, meias {len(sel.half)}")
    if not net.validated:
        print("⚠ Rede de origem não validada; rode 'validate' antes de confiar no seletor")
    manifest = RunManifest(
        command="prune", parameters=_parameters(args), input_digests={"net": digest}, outputs=out.names,
    )
    return EXIT_OK, manifest


def cmd_validate(args: argparse.Namespace, settings: Settings, out: Outputs) -> Tuple[int, RunManifest]:
    net, digest = _network_arg(args.net, args.n)
    seed = settings.validation_seed if args.seed is None else args.seed
    budget = settings.validation_budget if args.budget is None else args.budget
    report = validate_sorter(net, budget=budget, seed=seed, exhaustive_limit=settings.exhaustive_limit)
    out.write("validation.json", _json(report.to_dict()))
    manifest = RunManifest(
        command="validate", parameters=_parameters(args), input_digests={"net": digest},
        seed=seed, outputs=out.names,
    )
    mode = "exaustiva" if report.exhaustive else "aleatória"
    if report.passed:
        print(f"✓ Rede de {net.n} fios ordena ({report.checked} vetores, verificação {mode})")
        return EXIT_OK, manifest
    print(f"❌ Rede de {net.n} fios não ordena: entrada {report.counterexample} -> saída {report.output}")
    return EXIT_VIOLATION, manifest


def _neuron_config(args: argparse.Namespace, settings: Settings, kind: str) -> Tuple[NeuronConfig, Dict[str, str]]:
    digests: Dict[str, str] = {}
    data: Dict[str, Any] = {}
    if args.config:
        try:
            data = json.loads(_read_text(args.config))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Configuração JSON inválida em {args.config}: {e}")
        if not isinstance(data, dict):
            raise ConfigurationError("Configuração do neurônio deve ser um objeto JSON")
        digests["config"] = file_digest(args.config)

    data.setdefault("window", settings.window)
    data.setdefault("pulse", settings.pulse)
    data.setdefault("acc_bits", settings.acc_bits)
    data.setdefault("weight_bits", settings.weight_bits)
    if args.weights:
        try:
            data["weights"] = [int(w) for w in args.weights.split(",")]
        except ValueError:
            raise ConfigurationError(f"--weights deve ser uma lista de inteiros: {args.weights!r}")
    if args.n is not None:
        data["n"] = args.n
    elif "n" not in data and "weights" in data:
        data["n"] = len(data["weights"])
    if "n" not in data:
        raise ConfigurationError("Informe --n, --weights ou --config")
    data.setdefault("weights", [2 ** data["weight_bits"] - 1] * data["n"])
    if args.threshold is not None:
        data["threshold"] = args.threshold
    data.setdefault("threshold", 2 ** (data["acc_bits"] - 1))
    if args.k is not None:
        data["k"] = args.k
    if args.strict_threshold:
        data["strict_threshold"] = True
    data["kind"] = kind
    if args.net:
        data["network"] = _neuron_network(args.net)
        if Path(args.net).exists():
            digests["net"] = file_digest(args.net)

    try:
        return NeuronConfig(**data), digests
    except ValidationError as e:
        raise ConfigurationError(f"Configuração do neurônio inválida: {e}")


def _volleys(args: argparse.Namespace, cfg: NeuronConfig) -> Tuple[list, Dict[str, str]]:
    if args.volleys and args.gen_volleys is not None:
        raise ToolkitError("Use --volleys ou --gen-volleys, não ambos")
    if args.volleys:
        return load_volleys(_read_text(args.volleys), cfg.n), {"volleys": file_digest(args.volleys)}
    if args.gen_volleys is None:
        raise ToolkitError("Informe --volleys ARQUIVO ou --gen-volleys N --seed S")
    if args.seed is None:
        raise ToolkitError("--gen-volleys exige --seed")
    volleys = generate_volleys(
        cfg.n,
        args.gen_volleys,
        args.density,
        args.seed,
        window=cfg.window,
        distribution=args.distribution,
        max_spikes=args.max_spikes,
    )
    return volleys, {}


def cmd_simulate(args: argparse.Namespace, settings: Settings, out: Outputs) -> Tuple[int, RunManifest]:
    cfg, digests = _neuron_config(args, settings, args.kind)
    volleys, volley_digests = _volleys(args, cfg)
    digests.update(volley_digests)

    results = simulate_many(cfg, volleys)
    out.write("results.json", _json([r.model_dump() for r in results]))
    if args.gen_volleys is not None:
        out.write("volleys.json", dump_volleys(volleys) + "\n")

    fired = sum(r.fire_time is not None for r in results)
    print(f"✓ {len(results)} volley(s) simulados ({cfg.kind.value}, n={cfg.n}): {fired} disparo(s)")
    if len(results) == 1:
        print(f"   Tempo de disparo: {results[0].fire_time}")
    dropped = sum(r.dropped_spikes for r in results)
    if dropped:
        print(f"⚠ {dropped} spike(s) descartados pelo top-{cfg.k}")
    manifest = RunManifest(
        command="simulate", parameters=_parameters(args), input_digests=digests,
        seed=args.seed, outputs=out.names,
    )
    return EXIT_OK, manifest


def cmd_compare(args: argparse.Namespace, settings: Settings, out: Outputs) -> Tuple[int, RunManifest]:
    base, digests = _neuron_config(args, settings, args.base)
    alt, _ = _neuron_config(args, settings, args.alt)
    volleys, volley_digests = _volleys(args, base)
    digests.update(volley_digests)

    report = compare_designs(base, alt, volleys)
    out.write("equivalence.json", _json(report.summary()))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["volley", "base_fire", "alt_fire", "fire_match", "trace_match", "max_active", "dropped_spikes"])
    for v in report.volleys:
        writer.writerow([
            v.index,
            "" if v.base_fire is None else v.base_fire,
            "" if v.alt_fire is None else v.alt_fire,
            int(v.fire_match),
            int(v.trace_match),
            v.max_active,
            v.dropped_spikes,
        ])
    out.write("equivalence.csv", buffer.getvalue())

    networks = {}
    for cfg in (base, alt):
        if cfg.kind.needs_k:
            networks[cfg.network if cfg.network != "auto" else "auto"] = default_network(cfg.kind, cfg.n, cfg.network)
    networks = networks or default_networks(base.n)
    if networks and args.k is not None and is_power_of_two(base.n) and is_power_of_two(args.k):
        out.write("cost.csv", to_csv(rank_designs(base.n, args.k, networks, base.acc_bits, base.pulse)))
    else:
        print("⚠ Tabela de custo omitida (exige --k potência de dois e uma rede disponível)")

    summary = report.summary()
    print(f"📊 {base.kind.value} x {alt.kind.value}: {summary['volleys']} volleys, "
          f"acerto {summary['match_rate']:.2%}, esparsos {summary['sparse_volleys']}, "
          f"spikes descartados {summary['dropped_spikes']}")

    manifest = RunManifest(
        command="compare", parameters=_parameters(args), input_digests=digests,
        seed=args.seed, outputs=out.names,
    )
    violation = not report.implication_holds
    if not base.kind.needs_k and report.ordering_violations:
        violation = True
    if violation:
        print(f"❌ Propriedade violada: implicação {'ok' if report.implication_holds else 'falhou'}, "
              f"{report.ordering_violations} violação(ões) de ordenação")
        return EXIT_VIOLATION, manifest
    print("✓ Volleys esparsos equivalentes e truncamento bem ordenado")
    return EXIT_OK, manifest


def cmd_cost(args: argparse.Namespace, settings: Settings, out: Outputs) -> Tuple[int, RunManifest]:
    if args.n is None or args.k is None:
        raise ToolkitError("cost exige --n e --k")
    digests: Dict[str, str] = {}
    networks = default_networks(args.n)
    if args.net:
        net, digests["net"] = _network_arg(args.net, args.n)
        networks["custom"] = net
    if not networks:
        raise ToolkitError(f"Nenhum ordenador disponível para n={args.n}; informe --net")

    rows = rank_designs(args.n, args.k, networks, settings.acc_bits, settings.pulse)
    out.write("cost.csv", to_csv(rows))
    out.write("cost.json", to_json(rows) + "\n")
    if args.plot_data:
        out.write("plot_data.csv", plot_data_csv(rows))

    sweep = []
    for label, net in sorted(networks.items()):
        for row in selector_sweep({args.n: net}, range(1, args.n + 1)):
            sweep.append({"source": label, **row})
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(sweep[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(sweep)
    out.write("selector_sweep.csv", buffer.getvalue())

    print(f"📊 Custo (GE) para n={args.n}, k={args.k}:")
    for row in rows:
        print(f"   {row.design:<28} dendrito {row.ge:>5}   neurônio {row.neuron_ge:>5}")
    manifest = RunManifest(
        command="cost", parameters=_parameters(args), input_digests=digests, outputs=out.names,
    )
    return EXIT_OK, manifest


def _emit_design(args: argparse.Namespace) -> Tuple[object, Optional[SortingNetwork], Dict[str, str]]:
    digests: Dict[str, str] = {}
    if args.selector:
        if not args.net:
            raise ToolkitError("emit --selector exige --net")
        net, digests["net"] = _network_arg(args.net, args.n)
        if args.k is None or args.k == net.n:
            return net, net, digests
        return prune_topk(net, args.k), net, digests

    kind = DendriteKind(args.kind)
    network = None
    if kind.needs_k:
        if args.net:
            network, digests["net"] = _network_arg(args.net, args.n)
        elif args.n is not None:
            network = default_network(kind, args.n)
    n = args.n if args.n is not None else (network.n if network else None)
    if n is None:
        raise ToolkitError("emit exige --n")
    return make_design(kind, n, args.k, network), network, digests


def _fidelity_inputs(n: int, seed: int) -> np.ndarray:
    if n <= 10:
        return all_binary_inputs(n)
    rng = np.random.default_rng(seed)
    return (rng.random((n, 1024)) < 0.5).astype(np.uint8)


def cmd_emit(args: argparse.Namespace, settings: Settings, out: Outputs) -> Tuple[int, RunManifest]:
    design, network, digests = _emit_design(args)
    netlist = build_netlist(design)
    text = render_netlist(netlist)
    out.write("netlist.txt", text)

    seed = settings.validation_seed if args.seed is None else args.seed
    parsed = parse_netlist(text)
    inputs = _fidelity_inputs(len(parsed.inputs), seed)
    produced = interpret_netlist(parsed, inputs)
    counts = parsed.cell_counts()

    if isinstance(design, DendriteDesign):
        expected = dendrite_increments(design.kind, design.k, inputs, network)
        matches = bool(np.array_equal(output_value(produced), expected))
        report = design_gates(design)
    elif isinstance(design, SortingNetwork):
        matches = bool(np.array_equal(produced, eval_bits(design, inputs)))
        report = selector_gates(prune_topk(design, design.n))
    else:
        matches = bool(np.array_equal(produced, eval_topk(design, inputs)))
        report = selector_gates(design)

    counts_match = all(
        counts[cell] == count for cell, count in report.cell_counts().items() if cell != "DFF"
    )
    manifest = RunManifest(
        command="emit", parameters=_parameters(args), input_digests=digests, seed=seed, outputs=out.names,
    )
    print(f"✓ Netlist {netlist.label}: " + ", ".join(f"{k}={v}" for k, v in counts.items()))
    if not matches or not counts_match:
        print(f"❌ Netlist diverge da avaliação direta (saídas {'ok' if matches else 'divergem'}, "
              f"células {'ok' if counts_match else 'divergem'})")
        return EXIT_VIOLATION, manifest
    print(f"✓ Netlist confere com a avaliação direta em {inputs.shape[1]} vetores")
    return EXIT_OK, manifest


def cmd_report(args: argparse.Namespace, settings: Settings, out: Outputs) -> Tuple[int, RunManifest]:
    ledger = RunLedger(db_path=settings.ledger_path)
    report = ledger.get_report(limit=args.limit)
    out.write("report.json", _json(report))
    print(f"📊 {report['total_runs']} execução(ões), {report['failures']} com falha")
    for command, stats in report["by_command"].items():
        print(f"   {command:<10} {stats['runs']:>5} execuções, {stats['failures']} falhas")
    return EXIT_OK, RunManifest(command="report", parameters=_parameters(args), outputs=out.names)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="Diretório de saída (default: out)")
    common.add_argument("--no-ledger", action="store_true", help="Não registrar a execução no histórico")
    common.add_argument("--verbose", action="store_true", help="Log em nível DEBUG")

    neuron = argparse.ArgumentParser(add_help=False)
    neuron.add_argument("--config", help="Configuração do neurônio (JSON)")
    neuron.add_argument("--n", type=int)
    neuron.add_argument("--k", type=int)
    neuron.add_argument("--weights", help="Pesos separados por vírgula")
    neuron.add_argument("--threshold", type=int)
    neuron.add_argument("--strict-threshold", action="store_true", help="Dispara com potencial > limiar")
    neuron.add_argument("--net", help="Ordenador: auto, bitonic, bundled ou arquivo")
    neuron.add_argument("--volleys", help="Arquivo de volleys (JSON ou CSV)")
    neuron.add_argument("--gen-volleys", type=int, metavar="COUNT")
    neuron.add_argument("--density", type=float, default=0.1)
    neuron.add_argument("--seed", type=int)
    neuron.add_argument("--distribution", choices=DISTRIBUTIONS, default="uniform")
    neuron.add_argument("--max-spikes", type=int)

    parser = argparse.ArgumentParser(
        prog="run_toolkit",
        description="Redes de ordenação unárias, seletores top-k e neurônios SRM0-RNL",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="Gera um ordenador")
    p.add_argument("width", type=int, metavar="N")
    p.add_argument("family", nargs="?", default="bitonic", choices=["bitonic", "bundled"], metavar="KIND")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("prune", parents=[common], help="Poda um ordenador em seletor top-k")
    p.add_argument("--net", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("validate", parents=[common], help="Verifica um ordenador (zero-um)")
    p.add_argument("--net", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", parents=[common, neuron], help="Simula um neurônio")
    p.add_argument("--kind", choices=KIND_CHOICES, default=DendriteKind.PC_COMPACT.value)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", parents=[common, neuron], help="Compara dois dendritos")
    p.add_argument("--base", choices=KIND_CHOICES, default=DendriteKind.PC_COMPACT.value)
    p.add_argument("--alt", choices=KIND_CHOICES, default=DendriteKind.TOPK_PC.value)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("cost", parents=[common], help="Tabela de custo em GE")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--net")
    p.add_argument("--plot-data", action="store_true", help="Grava tuplas (n, k, projeto, GE)")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("emit", parents=[common], help="Gera a netlist de um projeto")
    p.add_argument("--kind", choices=KIND_CHOICES, default=DendriteKind.TOPK_PC.value)
    p.add_argument("--selector", action="store_true", help="Só o seletor (ou o ordenador, sem --k)")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--net")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("report", parents=[common], help="Resumo do histórico de execuções")
    p.add_argument("--limit", type=int, default=1000)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None, settings: Optional[Settings] = None) -> int:
    """
    Executa um comando e retorna o código de saída.

    Args:
        argv: Argumentos (se None, usa sys.argv)
        settings: Settings (se None, carrega do ambiente / .env)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        if settings is None:
            settings = get_settings()
        out = Outputs(args.out)
        code, manifest = args.func(args, settings, out)
    except (ToolkitError, ValidationError) as e:
        print(f"❌ Erro: {e}")
        return EXIT_USAGE
    except OSError as e:
        print(f"❌ Erro de arquivo: {e}")
        return EXIT_USAGE

    manifest.write(out.dir)
    if not args.no_ledger and args.command != "report":
        RunLedger(db_path=settings.ledger_path).log_run(manifest, code)
    return code
