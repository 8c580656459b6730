"""Config-driven experiment runner.

Usage:
    infosub run --config exp.toml [--output DIR] [--seed N]
    infosub validate --config exp.toml

A config names one experiment and overrides any defaults; `validate` lists
every violation without touching the filesystem, `run` writes a resolved
config (all defaults materialized) next to its artifacts so the exact run
can be reproduced. Exit codes: 0 success, 1 runtime failure, 2 invalid
config.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
import traceback
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .data import (
    FairSynthConfig,
    LvParams,
    SplitSpec,
    adult_schema,
    covertype_schema,
    gen_correlated_gaussians,
    gen_fair_synthetic,
    load_csv_dataset,
    simulate_lotka_volterra,
    split,
)
from .mi import (
    OracleConfig,
    critic_train_step,
    gaussian_mi_nats,
    make_critic,
    smile_value,
)
from .mi.oracles import ksg_mi
from .numerics import OptimizerState, make_rng, save_mlp
from .reports import (
    fairness_metrics,
    information_report,
    predict_labels,
    render_accuracy_table,
    render_fairness_table,
    render_info_table,
    to_json,
    train_classifier,
)
from .reports.sweep import lambda_sweep
from .subtraction import (
    DiagnosticsTrace,
    EpochRecord,
    SubtractionConfig,
    predictor_config_from,
    train_information_subtraction,
    train_unbiased_predictor,
    venn_decompose,
)

OUTPUT_ENV = "INFOSUB_OUTPUT"
EXPERIMENTS = ("lotka_volterra", "venn", "fair_synth", "adult", "covertype",
               "gaussian_oracle", "sweep")

# Experiment-specific training defaults layered over SubtractionConfig.
# The predator-prey signal needs heavier critics and an instance-noise ramp
# to keep the conditional term trainable; see the config reference.
_SUBTRACTION_KIND_DEFAULTS: dict = {
    "lotka_volterra": {"lr_critic": 1e-3, "critic_steps": 4,
                       "total_epochs": 2600, "noise_start": 0.5,
                       "noise_floor": 0.1},
}

_DATA_DEFAULTS = {
    "lotka_volterra": lambda: _lv_data_defaults(),
    "venn": lambda: _lv_data_defaults(),
    "fair_synth": lambda: _fair_data_defaults(),
    "adult": lambda: {"csv": ""},
    "covertype": lambda: {"csv": "", "subsample": 20000},
    "gaussian_oracle": lambda: {"rhos": [0.0, 0.3, 0.6, 0.9], "n": 5000,
                                "critic_steps": 3000, "hidden": [64, 64],
                                "learning_rate": 5e-4, "batch_size": 256,
                                "eval_perms": 8},
    "sweep": lambda: {"leak_weights": [0.0, 0.5, 1.0, 2.0, 5.0], "n": 1500},
}


def _lv_data_defaults() -> dict:
    d = dataclasses.asdict(LvParams())
    for k in ("a", "b", "c", "d"):
        d[k] = list(d[k])
    return d


def _fair_data_defaults() -> dict:
    d = dataclasses.asdict(FairSynthConfig())
    for k in ("country_priors", "w_means", "w_stds"):
        d[k] = list(d[k])
    return d


def load_config(path: str | Path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _merge_section(defaults: dict, given, section: str,
                   violations: list[str]) -> dict:
    out = dict(defaults)
    if given is None:
        return out
    if not isinstance(given, dict):
        violations.append(f"{section}: expected a table, got {type(given).__name__}")
        return out
    for key, value in given.items():
        if key not in defaults:
            violations.append(f"{section}.{key}: unknown field")
        else:
            out[key] = value
    return out


def resolve_config(raw: dict, output_override=None,
                   seed_override=None) -> tuple[dict, list[str]]:
    """Materialize every default; returns (resolved, violations)."""
    violations: list[str] = []
    if not isinstance(raw, dict):
        return {}, ["config: expected a table at top level"]

    kind = raw.get("experiment")
    if kind not in EXPERIMENTS:
        violations.append(
            f"experiment: must be one of {', '.join(EXPERIMENTS)}; got {kind!r}")
        return {}, violations

    known_top = {"experiment", "label", "seed", "output", "subtraction",
                 "oracle", "data", "split"}
    for key in raw:
        if key not in known_top:
            violations.append(f"{key}: unknown field")

    seed = raw.get("seed", 0)
    if seed_override is not None:
        seed = seed_override
    if not isinstance(seed, int) or isinstance(seed, bool):
        violations.append(f"seed: expected an integer, got {seed!r}")
        seed = 0

    label = raw.get("label") or time.strftime("%Y%m%dT%H%M%S", time.gmtime())
    if not isinstance(label, str) or "/" in label:
        violations.append(f"label: expected a plain name, got {label!r}")
        label = "invalid"

    output = output_override or raw.get("output") \
        or os.environ.get(OUTPUT_ENV) or "runs"

    sub_defaults = dataclasses.asdict(SubtractionConfig(seed=seed))
    sub_defaults.update(_SUBTRACTION_KIND_DEFAULTS.get(kind, {}))
    for k in ("generator_hidden", "critic_hidden", "predictor_hidden"):
        sub_defaults[k] = list(sub_defaults[k])
    sub = _merge_section(sub_defaults, raw.get("subtraction"), "subtraction",
                         violations)
    for k in ("generator_hidden", "critic_hidden", "predictor_hidden"):
        if not (isinstance(sub[k], list) and
                all(isinstance(v, int) and v > 0 for v in sub[k])):
            violations.append(f"subtraction.{k}: expected a list of positive ints")
            sub[k] = sub_defaults[k]
    try:
        for msg in _subtraction_config(sub).violations():
            violations.append(f"subtraction: {msg}")
    except (TypeError, ValueError) as err:
        violations.append(f"subtraction: {err}")

    oracle = _merge_section(dataclasses.asdict(OracleConfig()),
                            raw.get("oracle"), "oracle", violations)
    if not (isinstance(oracle["ksg_neighbors"], int)
            and oracle["ksg_neighbors"] >= 1):
        violations.append("oracle.ksg_neighbors: expected a positive integer")
    if not (isinstance(oracle["plugin_bins"], int) and oracle["plugin_bins"] >= 2):
        violations.append("oracle.plugin_bins: expected an integer >= 2")

    data = _merge_section(_DATA_DEFAULTS[kind](), raw.get("data"), "data",
                          violations)
    split_cfg = None
    if kind == "adult":
        split_cfg = _merge_section(
            {"mode": "iid", "train_n": 5000, "test_n": 5000, "seed": seed},
            raw.get("split"), "split", violations)
        if split_cfg["mode"] != "iid":
            violations.append("split.mode: adult uses 'iid'")
    elif kind == "covertype":
        split_cfg = _merge_section(
            {"mode": "by_domain", "train_domains": [0], "test_domains": [1]},
            raw.get("split"), "split", violations)
        if split_cfg["mode"] != "by_domain":
            violations.append("split.mode: covertype uses 'by_domain'")
    elif raw.get("split") is not None:
        violations.append(f"split: not used by experiment {kind!r}")

    if kind in ("adult", "covertype"):
        csv = data.get("csv")
        if not csv:
            violations.append("data.csv: path to the dataset file is required")
        elif not Path(csv).is_file():
            violations.append(f"data.csv: no file at {csv!r}")

    resolved = {"experiment": kind, "label": label, "seed": seed,
                "output": str(output), "subtraction": sub, "oracle": oracle,
                "data": data}
    if split_cfg is not None:
        resolved["split"] = split_cfg
    return resolved, violations


def _subtraction_config(sub: dict) -> SubtractionConfig:
    kwargs = dict(sub)
    for k in ("generator_hidden", "critic_hidden", "predictor_hidden"):
        kwargs[k] = tuple(kwargs[k])
    return SubtractionConfig(**kwargs)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if v is None:
        raise ValueError("cannot serialize None to TOML; drop the field")
    raise ValueError(f"cannot serialize {type(v).__name__} to TOML")


def emit_toml(resolved: dict) -> str:
    lines = []
    for key, value in resolved.items():
        if not isinstance(value, dict):
            lines.append(f"{key} = {_toml_value(value)}")
    for key, value in resolved.items():
        if isinstance(value, dict):
            lines.append("")
            lines.append(f"[{key}]")
            for k, v in value.items():
                if v is None:
                    continue
                lines.append(f"{k} = {_toml_value(v)}")
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _dataset_csv(dataset) -> str:
    names = [c.name for c in dataset.columns]
    cols = [dataset.arrays[n] for n in names]
    lines = [",".join(names)]
    for i in range(dataset.n_rows):
        lines.append(",".join(f"{c[i]:.17g}" for c in cols))
    return "\n".join(lines) + "\n"


def _save_subtractor(sub, ckpt_dir: Path) -> None:
    ckpt_dir.mkdir(parents=True, exist_ok=True)
    save_mlp(sub.generator, ckpt_dir / "generator.mlp")
    save_mlp(sub.reconstructor, ckpt_dir / "reconstructor.mlp")
    save_mlp(sub.critic_full.model, ckpt_dir / "critic_full.mlp")
    save_mlp(sub.critic_leak.model, ckpt_dir / "critic_leak.mlp")


def _stderr_log(line: str) -> None:
    print(line, file=sys.stderr)


def _run_subtraction_experiment(resolved: dict, out: Path, condition, target,
                                dataset, condition_name: str,
                                target_name: str) -> None:
    cfg = _subtraction_config(resolved["subtraction"])
    oracle = OracleConfig(**resolved["oracle"])
    _write(out / "dataset.csv", _dataset_csv(dataset))
    sub = train_information_subtraction(cfg, condition, target,
                                        log_every=1, log=_stderr_log)
    _write(out / "trace.csv", sub.trace.to_csv())
    _save_subtractor(sub, out / "checkpoints")
    z = sub.represent(target)
    report = information_report(z, condition, target, oracle)
    payload = {"experiment": resolved["experiment"], "label": resolved["label"],
               "seed": resolved["seed"],
               "condition": condition_name, "target": target_name,
               "info": report.as_dict(),
               "critic_estimates_nats": {
                   "i_full": sub.mi_full_nats(condition, target),
                   "i_leak": sub.mi_leak_nats(condition, target)}}
    _write(out / "report.json", to_json(payload))
    title = (f"{resolved['experiment']}: X={condition_name} "
             f"Y={target_name} (oracle bits)")
    _write(out / "report.txt", render_info_table(report, title=title))


def run_lotka_volterra(resolved: dict, out: Path) -> None:
    data = dict(resolved["data"])
    for k in ("a", "b", "c", "d"):
        data[k] = tuple(data[k])
    ds = simulate_lotka_volterra(LvParams(**data))
    _run_subtraction_experiment(resolved, out, ds.column("S"), ds.column("G"),
                                ds, "S", "G")


def run_fair_synth(resolved: dict, out: Path) -> None:
    data = dict(resolved["data"])
    for k in ("country_priors", "w_means", "w_stds"):
        data[k] = tuple(data[k])
    ds = gen_fair_synthetic(FairSynthConfig(**data), seed=resolved["seed"])
    _run_subtraction_experiment(resolved, out, ds.column("X"), ds.column("Y"),
                                ds, "X", "Y")


def run_venn(resolved: dict, out: Path) -> None:
    data = dict(resolved["data"])
    for k in ("a", "b", "c", "d"):
        data[k] = tuple(data[k])
    ds = simulate_lotka_volterra(LvParams(**data))
    cfg = _subtraction_config(resolved["subtraction"])
    oracle = OracleConfig(**resolved["oracle"])
    _write(out / "dataset.csv", _dataset_csv(ds))
    venn = venn_decompose(ds.column("G"), ds.column("S"), ds.column("W"),
                          cfg, oracle=oracle, log_every=1, log=_stderr_log)
    ckpt = out / "checkpoints"
    ckpt.mkdir(parents=True, exist_ok=True)
    for sector in venn.sectors:
        save_mlp(sector.subtractor.generator, ckpt / f"{sector.name}.mlp")
        _write(ckpt / f"trace_{sector.name}.csv",
               sector.subtractor.trace.to_csv())
    _write(out / "trace.csv", venn.sectors[0].subtractor.trace.to_csv())
    payload = {"experiment": "venn", "label": resolved["label"],
               "seed": resolved["seed"], **venn.as_dict()}
    _write(out / "report.json", to_json(payload))
    _write(out / "report.txt", venn.render_text())


def run_gaussian_oracle(resolved: dict, out: Path) -> None:
    data = resolved["data"]
    oracle = OracleConfig(**resolved["oracle"])
    seed = resolved["seed"]
    rows = []
    trace = DiagnosticsTrace()
    step_base = 0
    for rho in data["rhos"]:
        a, b = gen_correlated_gaussians(n=data["n"], rho=float(rho),
                                        seed=seed + 101)
        true_nats = gaussian_mi_nats(float(rho))
        ksg = ksg_mi(a, b, oracle)
        critic = make_critic([("a", a.shape[1]), ("b", b.shape[1])],
                             hidden=tuple(data["hidden"]), seed=seed + 11)
        opt = OptimizerState(kind="adam",
                             learning_rate=float(data["learning_rate"]),
                             clip_norm=5.0)
        rng = make_rng(seed + 13)
        est = 0.0
        for step in range(int(data["critic_steps"])):
            idx = rng.choice(data["n"], size=int(data["batch_size"]),
                             replace=False)
            perm = rng.permutation(idx.size)
            est = critic_train_step(critic, [a[idx], b[idx]],
                                    [a[idx], b[idx][perm]], opt, 5.0)
            if (step + 1) % 100 == 0:
                trace.records.append(EpochRecord(
                    epoch=step_base + step, stage=f"critic_rho{rho}",
                    recon_loss=0.0, mi_full_nats=est, mi_leak_nats=0.0,
                    generator_loss=0.0))
                _stderr_log(f"rho={rho} step {step}: smile={est:.4f} nats")
        step_base += int(data["critic_steps"])
        t_joint, _ = critic.scores([a, b])
        values = []
        for _ in range(int(data["eval_perms"])):
            perm = rng.permutation(a.shape[0])
            t_marg, _ = critic.scores([a, b[perm]])
            values.append(smile_value(t_joint, t_marg, 5.0))
        smile = float(np.mean(values))
        rows.append({"rho": float(rho), "true_nats": true_nats,
                     "ksg_nats": ksg.value_nats, "smile_nats": smile,
                     "ksg_err": ksg.value_nats - true_nats,
                     "smile_err": smile - true_nats})
    _write(out / "trace.csv", trace.to_csv())
    payload = {"experiment": "gaussian_oracle", "label": resolved["label"],
               "seed": seed, "rows": rows}
    _write(out / "report.json", to_json(payload))
    lines = [f"{'rho':>5} {'true':>8} {'ksg':>8} {'smile':>8} (nats)"]
    for r in rows:
        lines.append(f"{r['rho']:5.2f} {r['true_nats']:8.4f} "
                     f"{r['ksg_nats']:8.4f} {r['smile_nats']:8.4f}")
    _write(out / "report.txt", "\n".join(lines) + "\n")


def run_sweep(resolved: dict, out: Path) -> None:
    data = resolved["data"]
    cfg = _subtraction_config(resolved["subtraction"])
    oracle = OracleConfig(**resolved["oracle"])
    ds = gen_fair_synthetic(FairSynthConfig(n=int(data["n"])),
                            seed=resolved["seed"])
    _write(out / "dataset.csv", _dataset_csv(ds))
    result = lambda_sweep(cfg, [float(w) for w in data["leak_weights"]],
                          ds.column("X"), ds.column("Y"), oracle,
                          log_every=1, log=_stderr_log)
    _write(out / "sweep.csv", result.to_csv())
    ckpt = out / "checkpoints"
    ckpt.mkdir(parents=True, exist_ok=True)
    for i, point in enumerate(result.points):
        _write(ckpt / f"trace_weight{i}.csv", point.trace.to_csv())
    _write(out / "trace.csv", result.points[0].trace.to_csv())
    payload = {"experiment": "sweep", "label": resolved["label"],
               "seed": resolved["seed"],
               "points": [{"leak_weight": p.leak_weight,
                           "i_full_bits": p.i_full_bits,
                           "i_leak_bits": p.i_leak_bits}
                          for p in result.points]}
    _write(out / "report.json", to_json(payload))
    lines = [f"{'weight':>7} {'kept':>7} {'leak':>7} (bits)"]
    for p in result.points:
        lines.append(f"{p.leak_weight:7.2f} {p.i_full_bits:7.3f} "
                     f"{p.i_leak_bits:7.3f}")
    _write(out / "report.txt", "\n".join(lines) + "\n")


def _run_tabular(resolved: dict, out: Path, schema, n_classes: int,
                 with_xz: bool) -> None:
    cfg = _subtraction_config(resolved["subtraction"])
    dataset = load_csv_dataset(resolved["data"]["csv"], schema)
    sp = resolved["split"]
    if sp["mode"] == "iid":
        spec = SplitSpec(mode="iid", train_n=int(sp["train_n"]),
                         test_n=int(sp["test_n"]), seed=int(sp["seed"]))
    else:
        spec = SplitSpec(mode="by_domain",
                         train_domains=tuple(sp["train_domains"]),
                         test_domains=tuple(sp["test_domains"]))
    train, test = split(dataset, spec)

    subsample = int(resolved["data"].get("subsample", 0) or 0)
    if subsample and train.n_rows > subsample:
        idx = make_rng(resolved["seed"]).choice(train.n_rows, size=subsample,
                                                replace=False)
        train = train.take(np.sort(idx))

    feats_tr = train.matrix(("feature",))
    feats_te = test.matrix(("feature",))
    y_tr = train.labels("target")
    y_te = test.labels("target")
    if with_xz:  # domain-generalization flavor: condition on the domain
        cond_tr = train.matrix(("domain",))
    else:  # fairness flavor: condition on the protected attribute
        cond_tr = train.labels("protected").astype(np.float64)[:, None]

    result = train_unbiased_predictor(
        cfg, feats_tr, cond_tr, y_tr, n_classes,
        test=(feats_te, y_te), log_every=1, log=_stderr_log)
    _write(out / "trace.csv", result.subtractor.trace.to_csv())
    _save_subtractor(result.subtractor, out / "checkpoints")
    save_mlp(result.predictor, out / "checkpoints" / "predictor.mlp")

    pred_cfg = predictor_config_from(cfg)
    base_x = train_classifier(feats_tr, y_tr, n_classes, pred_cfg)
    preds_x = predict_labels(base_x, feats_te)
    z_te = result.subtractor.represent(feats_te)
    preds_z = predict_labels(result.predictor, z_te)
    accuracies = {"x_features": float(np.mean(preds_x == y_te)),
                  "z_features": float(np.mean(preds_z == y_te))}
    payload = {"experiment": resolved["experiment"],
               "label": resolved["label"], "seed": resolved["seed"],
               "train_rows": train.n_rows, "test_rows": test.n_rows}

    if with_xz:
        xz_tr = np.concatenate(
            [feats_tr, result.subtractor.represent(feats_tr)], axis=1)
        xz_te = np.concatenate([feats_te, z_te], axis=1)
        base_xz = train_classifier(xz_tr, y_tr, n_classes, pred_cfg)
        preds_xz = predict_labels(base_xz, xz_te)
        accuracies["xz_features"] = float(np.mean(preds_xz == y_te))
        payload["accuracy"] = accuracies
        text = render_accuracy_table(accuracies, title=resolved["experiment"])
    else:
        prot_te = test.labels("protected")
        fair = {"x_features": fairness_metrics(preds_x, y_te, prot_te),
                "z_features": fairness_metrics(preds_z, y_te, prot_te)}
        payload["accuracy"] = accuracies
        payload["fairness"] = {k: v.as_dict() for k, v in fair.items()}
        text = (render_fairness_table(fair, title=resolved["experiment"])
                + "\n" + render_accuracy_table(accuracies))
    _write(out / "report.json", to_json(payload))
    _write(out / "report.txt", text)


def run_adult(resolved: dict, out: Path) -> None:
    _run_tabular(resolved, out, adult_schema(), n_classes=2, with_xz=False)


def run_covertype(resolved: dict, out: Path) -> None:
    _run_tabular(resolved, out, covertype_schema(), n_classes=7, with_xz=True)


_RUNNERS = {
    "lotka_volterra": run_lotka_volterra,
    "venn": run_venn,
    "fair_synth": run_fair_synth,
    "adult": run_adult,
    "covertype": run_covertype,
    "gaussian_oracle": run_gaussian_oracle,
    "sweep": run_sweep,
}


def cmd_validate(args) -> int:
    try:
        raw = load_config(args.config)
    except (OSError, tomllib.TOMLDecodeError) as err:
        print(f"config unreadable: {err}", file=sys.stderr)
        return 2
    _, violations = resolve_config(raw)
    for v in violations:
        print(v)
    return 2 if violations else 0


def cmd_run(args) -> int:
    try:
        raw = load_config(args.config)
    except (OSError, tomllib.TOMLDecodeError) as err:
        print(f"config unreadable: {err}", file=sys.stderr)
        return 2
    resolved, violations = resolve_config(raw, output_override=args.output,
                                          seed_override=args.seed)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return 2

    out = Path(resolved["output"]) / resolved["experiment"] / resolved["label"]
    try:
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "config.resolved", emit_toml(resolved))
        _RUNNERS[resolved["experiment"]](resolved, out)
    except Exception:
        traceback.print_exc()
        return 1
    print(out)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="infosub",
        description="Run or validate representation-subtraction experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("run", cmd_run), ("validate", cmd_validate)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML experiment file")
        if name == "run":
            p.add_argument("--output", help="output root (overrides config "
                           f"and ${OUTPUT_ENV})")
            p.add_argument("--seed", type=int, help="seed override")
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
