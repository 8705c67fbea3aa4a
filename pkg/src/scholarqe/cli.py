"""Command-line client for the search service.

Every subcommand is a thin HTTP client: with --server it talks to a running
instance, otherwise it mounts the service in-process and sends the same
requests over an ASGI transport, so batch workflows need no daemon. Exit
codes: 0 success, 1 usage error, 2 data/format error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import httpx

from . import __version__
from .config import AppConfig, load_config
from .errors import ConfigError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse that exits with the documented usage code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scholarqe", description=__doc__)
    parser.add_argument("--version", action="version", version=f"scholarqe {__version__}")
    parser.add_argument("--config", metavar="FILE", help="key = value config file")
    parser.add_argument("--server", metavar="URL",
                        help="base URL of a running service (default: in-process)")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build and persist the index and citation graph")
    p_index.add_argument("--corpus", metavar="PATH", help="override corpus_path")

    p_train = sub.add_parser("train", help="train embeddings and write the interchange file")
    p_train.add_argument("--seed", type=int, help="override the RNG seed")

    p_search = sub.add_parser("search", help="run a query")
    p_search.add_argument("query")
    p_search.add_argument("--mode", choices=("baseline", "qe"), default="qe")
    p_search.add_argument("--depth", type=int, help="result depth (default from config)")

    p_expand = sub.add_parser("expand", help="print the expansion audit for a query")
    p_expand.add_argument("query")
    p_expand.add_argument("--no-citations", action="store_true",
                          help="exclude cited papers from the candidate pool")

    p_eval = sub.add_parser("eval", help="run the three-way comparison and score runs")
    p_eval.add_argument("--runs", nargs="*", default=[], metavar="PATH",
                        help="extra run files to score alongside")
    p_eval.add_argument("--output-dir", metavar="DIR", help="where run files and the CSV go")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _load_app_config(args: argparse.Namespace) -> AppConfig:
    return load_config(args.config) if args.config else AppConfig()


class _InProcessClient:
    """Sends requests to the service mounted in-process over ASGI."""

    def __init__(self, app) -> None:
        self._app = app

    def post(self, path: str, json: dict) -> httpx.Response:
        import asyncio

        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://scholarqe.local", timeout=None
            ) as client:
                return await client.post(path, json=json)

        return asyncio.run(go())

    def close(self) -> None:
        pass


def _client(args: argparse.Namespace) -> httpx.Client | _InProcessClient:
    if args.server:
        return httpx.Client(base_url=args.server.rstrip("/"), timeout=None)
    from .service import create_app

    return _InProcessClient(create_app(_load_app_config(args)))


def _post(client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    return _handle(response)


def _handle(response: httpx.Response) -> dict:
    if response.status_code == 200:
        return response.json()
    try:
        detail = response.json().get("detail")
    except ValueError:
        detail = response.text
    print(f"error: {detail}", file=sys.stderr)
    if response.status_code == 400:
        raise SystemExit(EXIT_DATA)
    if response.status_code == 422:
        raise SystemExit(EXIT_USAGE)
    raise SystemExit(EXIT_INTERNAL)


def _cmd_index(client, args: argparse.Namespace) -> int:
    data = _post(client, "/index", {"corpus_path": args.corpus})
    print(f"documents:           {data['documents']}")
    print(f"citation edges:      {data['citation_edges']}")
    print(f"dangling references: {data['dangling_references']}")
    print(f"venues:              {data['venues']}")
    print(f"vocabulary size:     {data['vocabulary_size']}")
    print(f"avg doc length:      {data['avg_doc_len']:.2f}")
    print(f"index written to     {data['index_path']}")
    print(f"graph written to     {data['graph_path']}")
    return EXIT_OK


def _cmd_train(client, args: argparse.Namespace) -> int:
    data = _post(client, "/train", {"seed": args.seed})
    print(f"vocabulary size: {data['vocabulary_size']}")
    print(f"dimension:       {data['dimension']}")
    print(f"embeddings written to {data['embeddings_path']}")
    return EXIT_OK


def _cmd_search(client, args: argparse.Namespace) -> int:
    data = _post(client, "/search",
                 {"query": args.query, "mode": args.mode, "depth": args.depth})
    for hit in data["hits"]:
        print(f"{hit['rank']:4d}  {hit['doc_id']:<20}  {hit['score']:10.4f}  {hit['title']}")
    if not data["hits"]:
        print("no results", file=sys.stderr)
    return EXIT_OK


def _cmd_expand(client, args: argparse.Namespace) -> int:
    payload = {"query": args.query}
    if args.no_citations:
        payload["include_citations"] = False
    data = _post(client, "/expand", payload)
    print(json.dumps(data, indent=2, ensure_ascii=False))
    return EXIT_OK


def _cmd_eval(client, args: argparse.Namespace) -> int:
    data = _post(client, "/evaluate",
                 {"run_paths": args.runs, "output_dir": args.output_dir})
    print(data["table"])
    print()
    for path in data["run_paths"]:
        print(f"run file: {path}")
    print(f"report CSV: {data['csv_path']}")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(_load_app_config(args)), host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "serve":
            return _cmd_serve(args)
        client = _client(args)
        try:
            handler = {
                "index": _cmd_index,
                "train": _cmd_train,
                "search": _cmd_search,
                "expand": _cmd_expand,
                "eval": _cmd_eval,
            }[args.command]
            return handler(client, args)
        finally:
            client.close()
    except SystemExit:
        raise
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except httpx.HTTPError as exc:
        print(f"error: cannot reach server: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
