"""Command-line driver: detect, annotate, export, generate, eval."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import PipelineConfig, load_config, parse_override
from .exceptions import OntoDetectError
from .kb import load
from .railway import annotate_scene, detect_to_kb, evaluate, parse_scene_spec, ruleset_text, write_scene
from .vrml import ColorMap, export_vrml, load_color_map

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_params(p):
    p.add_argument("--params", help="JSON file of detection/ransac/topology parameters")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one parameter (repeatable; wins over --params)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ontodetect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="detect bounding boxes and dump a geometry KB")
    p.add_argument("--cloud", required=True)
    p.add_argument("--out", required=True)
    _add_params(p)

    p = sub.add_parser("annotate", help="run the full detection and annotation pipeline")
    p.add_argument("--cloud", required=True)
    p.add_argument("--rules", help="rule file (default: the shipped railway pack)")
    p.add_argument("--out", required=True)
    _add_params(p)

    p = sub.add_parser("export", help="write a VRML 2.0 view of a KB")
    p.add_argument("--kb", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--colors", help="colour overrides, lines of '<Class> r g b'")

    p = sub.add_parser("generate", help="write a synthetic scene and its truth KB")
    p.add_argument("--spec", required=True)
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("eval", help="per-class precision/recall of a KB against truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)

    sub.add_parser("rules", help="print the shipped railway rule pack")
    return parser


def _config(args) -> PipelineConfig:
    config = load_config(args.params) if args.params else PipelineConfig()
    overrides = dict(parse_override(s) for s in args.set)
    return config.updated(overrides) if overrides else config


def _read_kb(path):
    return load(Path(path).read_text(encoding="utf-8"))


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8")


def run(args) -> int:
    if args.command == "detect":
        kb, _ = detect_to_kb(args.cloud, _config(args))
        _write(args.out, kb.dump())
    elif args.command == "annotate":
        rules = Path(args.rules).read_text(encoding="utf-8") if args.rules else None
        kb, report = annotate_scene(args.cloud, _config(args), rules)
        _write(args.out, kb.dump())
        print(f"passes {report.iterations}, facts added {report.facts_added}, "
              f"conflicts {len(report.conflicts)}", file=sys.stderr)
        for c in report.conflicts:
            print(f"conflict: {c}", file=sys.stderr)
    elif args.command == "export":
        colors = load_color_map(args.colors) if args.colors else ColorMap()
        _write(args.out, export_vrml(_read_kb(args.kb), colors))
    elif args.command == "generate":
        spec = parse_scene_spec(Path(args.spec).read_text(encoding="utf-8"))
        xyz, kb = write_scene(spec, args.out_prefix)
        print(xyz)
        print(kb)
    elif args.command == "eval":
        sys.stdout.write(evaluate(_read_kb(args.pred), _read_kb(args.truth)).table())
    elif args.command == "rules":
        sys.stdout.write(ruleset_text())
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (OntoDetectError, OSError, ValueError) as exc:
        print(f"ontodetect {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
