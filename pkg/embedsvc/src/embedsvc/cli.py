"""Command-line entry points: serve the HTTP API or export an offline store."""

from __future__ import annotations

import argparse

from .config import ModelSpec, ServiceConfig


def _config_from_args(args) -> ServiceConfig:
    if args.config:
        cfg = ServiceConfig.from_file(args.config)
    else:
        cfg = ServiceConfig()
    if args.models:
        for name in args.models.split(","):
            name = name.strip().lower()
            if name and name not in cfg.models:
                cfg.models[name] = ModelSpec(name=name, backend=args.backend)
    return cfg


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _config_from_args(args)
    if not cfg.models:
        print("no models configured; pass --models or a config file")
        return 1
    uvicorn.run(create_app(cfg), host=args.host, port=args.port)
    return 0


def _cmd_export(args) -> int:
    from .store import export_store

    cfg = _config_from_args(args)
    if not cfg.models:
        print("no models configured; pass --models or a config file")
        return 1
    stats = export_store(
        args.dataset,
        list(cfg.models.values()),
        args.out,
        kinds=tuple(k.strip() for k in args.kinds.split(",")),
        cache_dir=cfg.cache_dir,
    )
    print(f"{stats['pairs']} pairs: wrote {stats['written']} records "
          f"({stats['skipped']} already present)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embedsvc")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--models", default=None, help="comma-separated model names")
    p.add_argument("--backend", default="hash", choices=["hash", "hf"])
    p.add_argument("--config", default=None, help="service config JSON")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("export", help="write an offline knowledge store")
    p.add_argument("--dataset", required=True, help="pairs CSV")
    p.add_argument("--models", default=None)
    p.add_argument("--backend", default="hash", choices=["hash", "hf"])
    p.add_argument("--kinds", default="sim,cls")
    p.add_argument("--out", required=True, help="store JSONL path")
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
