"""presse-ingest: raw French articles in, interchange documents out."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .adapter import IngestError, batch, ingest
from .backends import pick_backend


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="presse-ingest",
        description="Convert raw article text into annotated interchange "
                    "documents.",
    )
    parser.add_argument("--in", dest="input", required=True,
                        help="text file or directory of .txt files")
    parser.add_argument("--out", default="-",
                        help="output NDJSON file (default stdout)")
    parser.add_argument("--outlet", help="outlet name (single-file mode)")
    parser.add_argument("--date", help="ISO publication date (single-file mode)")
    parser.add_argument("--manifest",
                        help="JSON manifest mapping files to outlet/date")
    parser.add_argument("--backend", choices=("auto", "rules", "spacy"),
                        default="auto")
    parser.add_argument("--failures", help="where to write the failure list")
    args = parser.parse_args(argv)

    if args.backend == "rules":
        from .backends import RuleBackend
        backend = RuleBackend()
    else:
        backend = pick_backend(args.backend)

    source = Path(args.input)
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        out_path = args.out if args.out != "-" else "/dev/stdout"
        result = batch(source, manifest, out_path, backend=backend)
        if args.failures:
            Path(args.failures).write_text(
                json.dumps(result["failures"], ensure_ascii=False, indent=2),
                encoding="utf-8")
        print(f"ingested {result['written']} article(s), "
              f"{len(result['failures'])} failure(s)", file=sys.stderr)
        return 0 if not result["failures"] else 1

    if not args.outlet or not args.date:
        parser.error("--outlet and --date are required without --manifest")
    paths = sorted(source.glob("*.txt")) if source.is_dir() else [source]
    out = open(args.out, "w", encoding="utf-8") if args.out != "-" else sys.stdout
    failures = 0
    for path in paths:
        try:
            document = ingest(path.read_text(encoding="utf-8"),
                              outlet=args.outlet, published_at=args.date,
                              backend=backend)
            out.write(json.dumps(document, ensure_ascii=False) + "\n")
        except (OSError, UnicodeDecodeError, IngestError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            failures += 1
    if out is not sys.stdout:
        out.close()
    return 0 if not failures else 1


if __name__ == "__main__":
    sys.exit(main())
