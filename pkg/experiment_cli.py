"""
Deney komut satırı: yapılandırmadan deney çalıştırır, CSV tabloları ve JSON özet yazar.

Çıkış kodları: 0 başarı, 1 verify başarısız, 2 yapılandırma hatası, 3 kaynak sınırı aşıldı.
"""
import argparse
import math
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from cut_times import RejectionBudgetExhausted, TooFewSegments, palm_T_moments, return_probability, window_doubling
from environment import CookieLaw, CoupledPair, EnvironmentOrderError
from estimators import (
    TruncationRateExceeded,
    coupled_derivative,
    derivative_at_zero,
    derivative_v_m_beta,
    range_constant,
    speed_cut_ratio,
    speed_girsanov_sweep,
    speed_lln,
)
from experiment_config import (
    ConfigError,
    ExperimentConfig,
    ResultRecord,
    config_hash,
    emit_config,
    load_config,
    parse_lines,
)
from girsanov import ZeroWeightError
from lattice import ResourceLimitError
from oracle import construction_enumerate, enumerate_paths, girsanov_enumerate, golden_rows, tv_distance
from utils import create_output_directory, format_duration, write_csv, write_json
from walker import simulate_constructed, simulate_direct, simulate_discovery_order

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3

SIMULATE_BLOCK = 20

Table = Tuple[List[str], List[list], List[Dict[str, Any]]]

# subcommand'a göre --n bayrağının karşılığı
N_TARGETS = {"return-prob": "return_n", "oracle": "oracle_n"}


def _m_text(m) -> str:
    return "inf" if isinstance(m, float) and math.isinf(m) else str(int(m))


def cmd_simulate(cfg: ExperimentConfig) -> Table:
    seed = cfg.seed_spec()
    header = ["replicate", "time", "x"] + [f"z{i}" for i in range(1, cfg.d)] + ["E", "eta", "k", "cookie_used"]
    rows, results = [], []
    for i in range(cfg.replicates):
        child = seed.child(SIMULATE_BLOCK, i)
        if cfg.mechanism == "discovery":
            if cfg.env.kind != "iid":
                raise ConfigError("discovery mekanizması env.kind = iid gerektirir")
            traj = simulate_discovery_order(CookieLaw.parse(cfg.env.law), cfg.m, cfg.d, cfg.horizon, child,
                                            cfg.env.identical)
        else:
            env = cfg.environment(child.stream_id)
            run = simulate_direct if cfg.mechanism == "direct" else simulate_constructed
            traj = run(env, cfg.d, cfg.horizon, child)
        rows.extend([i] + row for row in traj.rows())
        results.append({"replicate": i, "stream_id": child.stream_id, "X_n": int(traj.X[-1])})
    return header, rows, results


def cmd_speed(cfg: ExperimentConfig) -> Table:
    env = cfg.environment()
    seed = cfg.seed_spec()
    estimates = [
        speed_lln(env, cfg.d, cfg.horizon, cfg.replicates, seed, cfg.threads),
        speed_cut_ratio(env, cfg.d, cfg.window, cfg.replicates, seed, cfg.threads, cfg.max_attempts,
                        cfg.max_truncation),
    ]
    header = ["method", "d", "m", "environment", "value", "stderr", "replicates", "horizon",
              "truncation_rate", "denominator"]
    rows = [[e.method, e.d, _m_text(e.m), e.beta, e.value, e.stderr, e.replicates, e.horizon, e.truncation_rate,
             e.denominator] for e in estimates]
    return header, rows, [e.record() for e in estimates]


def cmd_sweep(cfg: ExperimentConfig) -> Table:
    estimates = speed_girsanov_sweep(cfg.d, cfg.m, cfg.betas, cfg.window, cfg.replicates, cfg.seed_spec(),
                                     cfg.threads, cfg.max_attempts, cfg.beta_max, cfg.ess_threshold,
                                     cfg.max_truncation)
    header = ["beta", "d", "m", "xm_value", "xm_stderr", "numv_value", "numv_stderr", "ess", "ess_ok",
              "denominator", "replicates", "window", "truncation_rate"]
    rows = []
    for xm, numv in zip(estimates[0::2], estimates[1::2]):
        rows.append([float(xm.beta), xm.d, _m_text(xm.m), xm.value, xm.stderr, numv.value, numv.stderr, xm.ess,
                     xm.ess_ok, xm.denominator, xm.replicates, xm.horizon, xm.truncation_rate])
    return header, rows, [e.record() for e in estimates]


def cmd_derivative(cfg: ExperimentConfig) -> Table:
    seed = cfg.seed_spec()
    header = ["method", "d", "m", "beta_or_t", "value", "stderr", "ess", "replicates", "window",
              "truncation_rate"]
    rows, results = [], []
    zero = derivative_at_zero(cfg.d, cfg.window, cfg.replicates, seed, cfg.threads, cfg.max_attempts,
                              cfg.max_truncation)
    rows.append(["at-zero", cfg.d, "1", 0.0, zero.value, zero.stderr, None, zero.replicates, zero.window,
                 zero.truncation_rate])
    for beta in cfg.betas:
        est = derivative_v_m_beta(cfg.d, cfg.m, beta, cfg.window, cfg.replicates, seed, cfg.threads,
                                  cfg.max_attempts, cfg.ess_threshold, cfg.max_truncation)
        rows.append(["v-m-beta", cfg.d, _m_text(cfg.m), beta, est.value, est.stderr, est.ess, est.replicates,
                     est.window, est.truncation_rate])
    env = cfg.environment()
    if isinstance(env, CoupledPair):
        for t in cfg.t_grid:
            est = coupled_derivative(env, t, cfg.d, cfg.window, cfg.replicates, cfg.env_draws, seed, cfg.threads,
                                     cfg.max_attempts, cfg.ess_threshold, cfg.max_truncation)
            rows.append(["coupled", cfg.d, _m_text(cfg.m), t, est.value, est.stderr, est.min_ess,
                         est.replicates * est.env_draws, cfg.window, est.truncation_rate])
            results.append({"t": t, "within_stderr": est.within_stderr, "between_stderr": est.between_stderr,
                            "term1": est.term1.value, "term1_bound": est.term1_bound,
                            "term1_above_bound": est.term1_above_bound,
                            "monotonicity_bound": None if est.lower_bound is None else est.lower_bound.value,
                            "monotonicity_bound_stderr": None if est.lower_bound is None else est.lower_bound.stderr,
                            "term2": est.term2.value, "term2_before": est.term2_before.value,
                            "term2_after": est.term2_after.value, "term2_after_stderr": est.term2_after.stderr})
    results = [dict(zip(header, row)) for row in rows] + results
    return header, rows, results


def cmd_cut_moments(cfg: ExperimentConfig) -> Table:
    seed = cfg.seed_spec()
    moments = palm_T_moments(cfg.d, cfg.window, cfg.replicates, seed, cfg.threads, cfg.max_attempts,
                             moment_cap=cfg.moment_cap)
    doubling = window_doubling(cfg.d, cfg.window, cfg.replicates, seed, cfg.threads)
    header = ["quantity", "d", "window", "value", "stderr", "rhs"]
    rows = []
    for name in ("p_cut", "acceptance_rate", "palm_T", "palm_T2", "palm_T3", "T_unconditioned",
                 "T2_unconditioned", "T_on_cut"):
        est = getattr(moments, name)
        rows.append([name, cfg.d, cfg.window, est.value, est.stderr, None])
    for check in moments.identities:
        rows.append([check.name, cfg.d, cfg.window, check.difference.value, check.difference.stderr, check.rhs])
    rows.append(["truncation_rate", cfg.d, cfg.window, moments.truncation_rate, None, None])
    rows.append(["moment_cap", cfg.d, cfg.window, moments.moment_cap, None, None])
    rows.append(["palm_T_double_window", cfg.d, 2 * cfg.window, doubling.at_double.value,
                 doubling.at_double.stderr, None])
    rows.append(["window_shift_sigma", cfg.d, cfg.window, doubling.shift_sigma, None, None])
    return header, rows, [dict(zip(header, row)) for row in rows]


def cmd_range(cfg: ExperimentConfig) -> Table:
    est = range_constant(cfg.d, cfg.horizon, cfg.replicates, cfg.seed_spec(), cfg.threads, cfg.window,
                         max_attempts=cfg.max_attempts)
    header = ["form", "d", "n", "value", "stderr", "replicates"]
    rows = [["lln", cfg.d, cfg.horizon, est.lln.value, est.lln.stderr, est.replicates]]
    if est.palm is not None:
        rows.append(["palm", cfg.d, cfg.window, est.palm.value, est.palm.stderr, est.palm.n])
    return header, rows, [dict(zip(header, row)) for row in rows]


def cmd_return_prob(cfg: ExperimentConfig) -> Table:
    header = ["dim", "eps", "n", "method", "probability"]
    rows = [[dim, cfg.eps, cfg.return_n, cfg.method, return_probability(dim, cfg.eps, cfg.return_n, cfg.method)]
            for dim in cfg.dims]
    return header, rows, [dict(zip(header, row)) for row in rows]


def cmd_oracle(cfg: ExperimentConfig) -> Table:
    n = cfg.oracle_n
    if cfg.env.kind == "iid":
        atoms = enumerate_paths(cfg.d, n, CookieLaw.parse(cfg.env.law), m=cfg.m)
        results = [{"law": "annealed", "atoms": len(atoms)}]
    else:
        env = cfg.environment()
        atoms = enumerate_paths(cfg.d, n, env)
        construction = construction_enumerate(cfg.d, n, env)
        reweighted = girsanov_enumerate(cfg.d, n, env)
        results = [{"law": "quenched", "atoms": len(atoms),
                    "tv_direct_construction": tv_distance(atoms, construction),
                    "tv_direct_girsanov": tv_distance(atoms, reweighted),
                    "tv_construction_girsanov": tv_distance(construction, reweighted)}]
    return ["steps", "probability"], golden_rows(atoms), results


def cmd_verify(cfg: ExperimentConfig) -> Table:
    from acceptance import run_acceptance

    outcomes = run_acceptance(cfg, cfg.criteria or None)
    header = ["criterion", "name", "passed", "detail"]
    rows = [[o.number, o.name, o.passed, o.detail] for o in outcomes]
    return header, rows, [dict(zip(header, row)) for row in rows]


COMMANDS: Dict[str, Callable[[ExperimentConfig], Table]] = {
    "simulate": cmd_simulate,
    "speed": cmd_speed,
    "sweep": cmd_sweep,
    "derivative": cmd_derivative,
    "cut-moments": cmd_cut_moments,
    "range": cmd_range,
    "return-prob": cmd_return_prob,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="erwlab", description="Uyarılmış rastgele yürüyüş Monte Carlo laboratuvarı")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value veya .json yapılandırma dosyası")
    common.add_argument("--seed", dest="master_seed", help="64-bit ana tohum")
    common.add_argument("--threads", help="işçi süreç sayısı (yalnızca süreyi etkiler)")
    common.add_argument("--out", dest="output_dir", help="çıktı klasörü")
    common.add_argument("--d", help="kafes boyutu")
    common.add_argument("--m", help="site başına kurabiye sayısı (veya inf)")
    common.add_argument("--beta", dest="betas", help="β ızgarası, virgülle ayrılmış")
    common.add_argument("--t", dest="t_grid", help="t ızgarası, virgülle ayrılmış")
    common.add_argument("--replicates", help="replika sayısı")
    common.add_argument("--window", help="kesim penceresi")
    common.add_argument("--horizon", help="yörünge uzunluğu")
    common.add_argument("--env-draws", dest="env_draws", help="eşlenmiş türevde ortam çekilişi sayısı")
    common.add_argument("--eps", help="tembel yürüyüş hareket olasılığı")
    common.add_argument("--dim", dest="dims", help="dönüş olasılığı boyutları")
    common.add_argument("--n", dest="n", help="return-prob/oracle için adım sayısı, diğerlerinde ufuk")
    common.add_argument("--method", help="auto | convolution | quadrature")
    common.add_argument("--mechanism", help="direct | construction | discovery")
    common.add_argument("--criteria", help="verify için kriter numaraları")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="herhangi bir yapılandırma anahtarı (ör. env.law=uniform:0,0.3)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    keys = ("master_seed", "threads", "output_dir", "d", "m", "betas", "t_grid", "replicates", "window",
            "horizon", "env_draws", "eps", "dims", "method", "mechanism", "criteria")
    flat = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    if args.n is not None:
        flat[N_TARGETS.get(args.command, "horizon")] = args.n
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set KEY=VALUE bekleniyor: {item!r}")
        flat[key.strip()] = value.strip()
    return flat


def run(command: str, cfg: ExperimentConfig) -> int:
    started = time.time()
    digest = config_hash(cfg)
    print(f"🚀 {command} başlatıldı (config={digest[:12]}, seed={cfg.master_seed})")
    header, rows, results = COMMANDS[command](cfg)

    out_dir = create_output_directory(cfg.output_dir, command)
    # her satır kendini tanımlar: config hash + tohum
    write_csv(out_dir / f"{command}.csv", header + ["config_hash", "master_seed"],
              [list(row) + [digest, cfg.master_seed] for row in rows])
    (out_dir / "config.cfg").write_text(emit_config(cfg), encoding="utf-8")

    status = "ok"
    if command == "verify":
        failed = [r for r in rows if not r[2]]
        status = "failed" if failed else "ok"
    record = ResultRecord(config_hash=digest, experiment=cfg.experiment, subcommand=command,
                          master_seed=cfg.master_seed, stream_id=cfg.stream_id, wall_clock=time.time() - started,
                          config=parse_lines(emit_config(cfg)), results=results, status=status)
    write_json(out_dir / "summary.json", record.model_dump())
    print(f"📊 {len(rows)} satır yazıldı: {out_dir} ({format_duration(record.wall_clock)})")
    if status != "ok":
        print(f"❌ {command}: {len(failed)} kriter başarısız")
        return EXIT_VERIFY_FAILED
    print(f"✅ {command} tamamlandı")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
        return run(args.command, cfg)
    except (ConfigError, EnvironmentOrderError) as e:
        print(f"❌ Yapılandırma hatası: {str(e)}")
        return EXIT_CONFIG
    except (ResourceLimitError, RejectionBudgetExhausted, TruncationRateExceeded, TooFewSegments,
            ZeroWeightError) as e:
        print(f"❌ Kaynak sınırı: {str(e)}")
        return EXIT_RESOURCE
    except ValueError as e:
        print(f"❌ Geçersiz parametre: {str(e)}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
