"""Command-line launcher for the generation service."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, ServerConfig, load_lang_tokens
from .service import GenerationServer


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="genserver", description="Reference generation service"
    )
    parser.add_argument(
        "--mode",
        required=True,
        help="echo | lookup:PREDICTIONS_PATH | model:CHECKPOINT_PATH",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8750)
    parser.add_argument("--max-batch", dest="max_batch", type=int, default=64)
    parser.add_argument(
        "--lang-token-map",
        dest="lang_token_map",
        help="JSON file mapping language codes to model language tokens",
    )
    parser.add_argument("--verbose", "-v", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        kwargs = {"host": args.host, "port": args.port, "max_batch": args.max_batch}
        if args.lang_token_map:
            kwargs["lang_tokens"] = load_lang_tokens(args.lang_token_map)
        config = ServerConfig.from_mode_string(args.mode, **kwargs)
        server = GenerationServer(config)
    except (ConfigError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()
    return 0


if __name__ == "__main__":
    sys.exit(main())
