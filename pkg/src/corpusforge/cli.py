"""Command-line interface: every pipeline stage as one subcommand.

Exit codes: 0 success, 1 domain error, 2 usage error. All randomness flows
from one seed: stages without an explicit ``--seed`` derive theirs from the
config seed by stable-hashing the stage name, so reruns are byte-identical.
Flags win over the JSON config file, which wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .backends import (
    BackendError,
    asr_backend_from_spec,
    llm_backend_from_spec,
    tts_backend_from_spec,
)
from .composer import (
    compose_hybrid,
    load_recipe,
    plan_pairings,
    planned_hours,
    read_pairing_plan,
    verify_nesting,
    write_pairing_plan,
)
from .manifest import (
    Manifest,
    read_generation_log,
    read_manifest,
    read_voice_catalog,
    write_generation_log,
    write_manifest,
    write_voice_catalog,
)
from .quality_gates import (
    DURATION_BOUND_PRESETS,
    DurationFilterConfig,
    GvConfig,
    duration_ratio_gate,
    run_gv_pipeline,
    source_text_id,
)
from .report import (
    EvalPair,
    corpus_summary,
    corpus_summary_to_dict,
    evaluate,
    gv_report,
    gv_stats_to_dict,
    render_corpus_summary,
    render_gv_report,
    render_wer_table,
    wer_table_to_dict,
)
from .seeding import derive_seed
from .selection import (
    FinetuneSelectionConfig,
    VoiceSelectionConfig,
    select_finetune_subset,
    select_reference_voices,
)
from .textgen import load_prompt_schedule, run_textgen


@dataclass(frozen=True)
class PipelineConfig:
    """Defaults shared by every stage, loadable from a single JSON document."""

    seed: int = 0
    workers: int = 4
    tts_backend: str | None = None
    asr_backend: str | None = None
    llm_backend: str | None = None
    wer_threshold: float = 0.20
    max_attempts: int = 10
    temperature: float = 0.65
    duration_bounds: str = "narrow"
    prompts_dir: str | None = None

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown config key(s) {sorted(unknown)}")
        cfg = cls(**raw)
        if cfg.prompts_dir is not None and not Path(cfg.prompts_dir).is_dir():
            raise ValueError(f"{path}: prompts_dir does not exist: {cfg.prompts_dir}")
        return cfg


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    if getattr(args, "config", None):
        return PipelineConfig.load(args.config)
    return PipelineConfig()


def _stage_seed(args: argparse.Namespace, cfg: PipelineConfig, stage: str) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return derive_seed(cfg.seed, stage)


def _pick(flag_value, config_value):
    return flag_value if flag_value is not None else config_value


def _parse_bounds(args: argparse.Namespace, cfg: PipelineConfig) -> DurationFilterConfig:
    if args.lower is not None or args.upper is not None:
        if args.lower is None or args.upper is None:
            raise ValueError("--lower and --upper must be given together")
        return DurationFilterConfig(lower_bound=args.lower, upper_bound=args.upper)
    spec = _pick(args.bounds, cfg.duration_bounds)
    if spec in DURATION_BOUND_PRESETS:
        return DurationFilterConfig.from_preset(spec)
    if ":" in spec:
        lo, hi = spec.split(":", 1)
        return DurationFilterConfig(lower_bound=float(lo), upper_bound=float(hi))
    raise ValueError(
        f"unknown bounds {spec!r}: use a preset {sorted(DURATION_BOUND_PRESETS)} or LOWER:UPPER"
    )


def _cmd_select_finetune(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    selection_cfg = FinetuneSelectionConfig(
        target_hours=args.hours,
        min_duration_s=args.min_dur,
        max_duration_s=args.max_dur,
        rate_trim_fraction=args.trim,
        duration_bin_width_s=args.bin_width,
        seed=_stage_seed(args, cfg, "select-finetune"),
    )
    result = select_finetune_subset(read_manifest(args.manifest), selection_cfg)
    write_manifest(result.manifest, args.out)
    print(
        f"selected {len(result.manifest)} utterances, "
        f"{result.hours:.2f} h (target {args.hours} h)"
    )
    if result.exhausted:
        print("warning: pool exhausted before the hour target", file=sys.stderr)
    return 0


def _cmd_pick_voices(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    voice_cfg = VoiceSelectionConfig(
        min_duration_s=args.min_dur,
        max_duration_s=args.max_dur,
        percentile_lo=args.pct_lo,
        percentile_hi=args.pct_hi,
        seed=_stage_seed(args, cfg, "pick-voices"),
    )
    catalog = select_reference_voices(read_manifest(args.manifest), voice_cfg)
    write_voice_catalog(catalog, args.out)
    matched = len(catalog) - catalog.fallback_count()
    print(
        f"{len(catalog)} speakers: {matched} matched, "
        f"{catalog.fallback_count()} fallback"
    )
    return 0


def _cmd_plan_pairings(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    texts = read_manifest(args.texts)
    catalog = read_voice_catalog(args.voices)
    plan = plan_pairings(
        texts, catalog, args.hours, _stage_seed(args, cfg, "plan-pairings")
    )
    write_pairing_plan(plan, args.out)
    print(f"planned {len(plan)} pairings, {planned_hours(plan, texts):.2f} h of text")
    return 0


def _cmd_synthesize(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    seed = _stage_seed(args, cfg, "synthesize")
    gv_cfg = GvConfig(
        wer_threshold=_pick(args.threshold, cfg.wer_threshold),
        max_attempts=_pick(args.max_attempts, cfg.max_attempts),
        temperature=_pick(args.temperature, cfg.temperature),
        seed=seed,
    )
    texts = read_manifest(args.texts)
    catalog = read_voice_catalog(args.voices)
    plan = read_pairing_plan(args.pairing)
    tts = tts_backend_from_spec(_pick(args.tts_backend, cfg.tts_backend), seed=seed)
    verifier = asr_backend_from_spec(_pick(args.asr_backend, cfg.asr_backend), seed=seed)
    result = run_gv_pipeline(
        texts,
        catalog,
        plan,
        gv_cfg,
        tts,
        verifier,
        workers=_pick(args.workers, cfg.workers),
        keep_rejected=args.keep_rejected,
    )
    write_manifest(result.manifest, args.out)
    if args.records:
        write_generation_log(result.records, result.errors, args.records)
    print(
        f"accepted {result.accepted_count}  rejected {result.rejected_count}  "
        f"errored {result.errored_count}"
    )
    print(
        f"planned {planned_hours(plan, texts):.2f} h, "
        f"realized {result.manifest.total_hours():.2f} h"
    )
    return 0


def _cmd_filter_duration(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    bounds = _parse_bounds(args, cfg)
    synth = read_manifest(args.synth)
    refs = read_manifest(args.ref).by_id()
    accepted = []
    rejected = []
    for u in synth.entries:
        ref = refs.get(u.id) or refs.get(source_text_id(u.id))
        if ref is None:
            raise ValueError(f"no reference utterance for {u.id!r}")
        decision = duration_ratio_gate(u.duration_s, ref.duration_s, bounds)
        (accepted if decision.accepted else rejected).append(u)
    write_manifest(Manifest(tuple(accepted), name=synth.name), args.out)
    if args.rejected:
        write_manifest(Manifest(tuple(rejected), name=f"{synth.name}-rejected"), args.rejected)
    print(
        f"accepted {len(accepted)}  rejected {len(rejected)}  "
        f"bounds [{bounds.lower_bound}, {bounds.upper_bound}]"
    )
    return 0


def _cmd_compose(args: argparse.Namespace) -> int:
    recipe = load_recipe(args.recipe)
    synth_path = args.synth or recipe.synth_source
    real_path = args.real or recipe.real_source
    empty = Manifest((), name="empty")
    synth = read_manifest(synth_path) if synth_path else empty
    real = read_manifest(real_path) if real_path else empty
    composed = compose_hybrid(recipe, synth, real)
    write_manifest(composed, args.out)
    synth_hours = sum(u.duration_s for u in composed if u.origin != "real") / 3600.0
    real_hours = sum(u.duration_s for u in composed if u.origin == "real") / 3600.0
    print(
        f"composed {len(composed)} utterances: {synth_hours:.2f} h synthetic "
        f"(target {recipe.synth_hours}), {real_hours:.2f} h real (target {recipe.real_hours})"
    )
    return 0


def _cmd_verify_nesting(args: argparse.Namespace) -> int:
    smaller = read_manifest(args.smaller)
    larger = read_manifest(args.larger)
    nested = verify_nesting(smaller, larger)
    print(f"nested: {'true' if nested else 'false'}")
    return 0 if nested else 1


def _cmd_gen_text(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    seed = _stage_seed(args, cfg, "gen-text")
    sched = load_prompt_schedule(
        _pick(args.schedule, cfg.prompts_dir),
        batch_size=args.batch,
        target_utterances=args.target,
    )
    llm = llm_backend_from_spec(_pick(args.llm_backend, cfg.llm_backend), seed=seed)
    manifest = run_textgen(sched, llm, seed=seed, checkpoint_path=args.checkpoint)
    write_manifest(manifest, args.out)
    print(f"generated {len(manifest)} utterances, {manifest.total_hours():.2f} h estimated")
    return 0


def _read_hypotheses(path: str | Path) -> dict[str, str]:
    hyps: dict[str, str] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise ValueError(f"{path}: line {lineno}: expected 'id<TAB>text'")
            uid, text = line.split("\t", 1)
            if uid in hyps:
                raise ValueError(f"{path}: line {lineno}: duplicate id {uid!r}")
            hyps[uid] = text
    return hyps


def _cmd_evaluate(args: argparse.Namespace) -> int:
    m = read_manifest(args.manifest)
    by_id = m.by_id()
    pairs = []
    for uid, hyp in _read_hypotheses(args.hyps).items():
        u = by_id.get(uid)
        if u is None:
            raise ValueError(f"hypothesis references unknown utterance {uid!r}")
        pairs.append(EvalPair(utterance_id=uid, ref_text=u.text, hyp_text=hyp))
    table = evaluate(pairs, m)
    print(render_wer_table(table), end="")
    if args.out:
        Path(args.out).write_text(
            json.dumps(wer_table_to_dict(table), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    return 0


def _cmd_summary(args: argparse.Namespace) -> int:
    m = read_manifest(args.manifest)
    summary = corpus_summary(m)
    print(render_corpus_summary(summary, m.name), end="")
    if args.json:
        Path(args.json).write_text(
            json.dumps(corpus_summary_to_dict(summary), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    return 0


def _cmd_gv_report(args: argparse.Namespace) -> int:
    records, errors = read_generation_log(args.records)
    stats = gv_report(records)
    print(render_gv_report(stats), end="")
    if errors:
        print(f"transport errors: {len(errors)}")
    if args.json:
        Path(args.json).write_text(
            json.dumps(gv_stats_to_dict(stats), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpusforge",
        description="Synthetic speech corpus pipeline: selection, generation gating, "
        "composition, and reporting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="pipeline config JSON; flags win over it")
        p.add_argument("--seed", type=int, default=None, help="stage seed override")

    p = sub.add_parser("select-finetune", help="pick a finetuning subset by fair rotation")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--hours", type=float, default=12.0)
    p.add_argument("--min-dur", type=float, default=5.0)
    p.add_argument("--max-dur", type=float, default=15.0)
    p.add_argument("--trim", type=float, default=0.10)
    p.add_argument("--bin-width", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_select_finetune)

    p = sub.add_parser("pick-voices", help="choose one cloning reference per speaker")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--min-dur", type=float, default=8.0)
    p.add_argument("--max-dur", type=float, default=12.0)
    p.add_argument("--pct-lo", type=float, default=10.0)
    p.add_argument("--pct-hi", type=float, default=90.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pick_voices)

    p = sub.add_parser("plan-pairings", help="draw constrained text/voice pairs")
    common(p)
    p.add_argument("--texts", required=True)
    p.add_argument("--voices", required=True)
    p.add_argument("--hours", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plan_pairings)

    p = sub.add_parser("synthesize", help="run the generate-verify loop over a plan")
    common(p)
    p.add_argument("--texts", required=True)
    p.add_argument("--voices", required=True)
    p.add_argument("--pairing", required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--max-attempts", type=int, default=None)
    p.add_argument("--temperature", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--tts-backend", default=None)
    p.add_argument("--asr-backend", default=None)
    p.add_argument("--keep-rejected", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--records", default=None)
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("filter-duration", help="screen synthetic/reference duration ratios")
    common(p)
    p.add_argument("--synth", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--bounds", default=None, help="preset name or LOWER:UPPER")
    p.add_argument("--lower", type=float, default=None)
    p.add_argument("--upper", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--rejected", default=None)
    p.set_defaults(func=_cmd_filter_duration)

    p = sub.add_parser("compose", help="compose a hybrid dataset from a recipe")
    common(p)
    p.add_argument("--recipe", required=True)
    p.add_argument("--synth", default=None, help="override recipe synth_source")
    p.add_argument("--real", default=None, help="override recipe real_source")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compose)

    p = sub.add_parser("verify-nesting", help="check strict-subset nesting of two manifests")
    common(p)
    p.add_argument("smaller")
    p.add_argument("larger")
    p.set_defaults(func=_cmd_verify_nesting)

    p = sub.add_parser("gen-text", help="generate dialogue text with the prompt schedule")
    common(p)
    p.add_argument("--schedule", default=None, help="prompt directory (default: packaged)")
    p.add_argument("--target", type=int, default=50_000)
    p.add_argument("--batch", type=int, default=4)
    p.add_argument("--llm-backend", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--checkpoint", default=None)
    p.set_defaults(func=_cmd_gen_text)

    p = sub.add_parser("evaluate", help="WER table from external hypotheses (id<TAB>text)")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--hyps", required=True)
    p.add_argument("--out", default=None, help="machine-readable JSON report")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("summary", help="per-split corpus statistics")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--json", default=None)
    p.set_defaults(func=_cmd_summary)

    p = sub.add_parser("gv-report", help="audit statistics of a generation records file")
    common(p)
    p.add_argument("--records", required=True)
    p.add_argument("--json", default=None)
    p.set_defaults(func=_cmd_gv_report)

    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse argv and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, BackendError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
