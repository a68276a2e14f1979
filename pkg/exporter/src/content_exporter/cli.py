import argparse
import logging
import sys

from .encoders import EncoderUnavailable
from .exporter import ExportJob, export_content_vectors


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="citerec-export",
        description="Encode corpus titles+abstracts into an embedding file")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", help="encode a corpus file")
    p.add_argument("--corpus", required=True, help="line-delimited corpus file")
    p.add_argument("--encoder", required=True,
                   help="hash:<dim>, transformer:<model>, auto, or a model id")
    p.add_argument("--out", required=True, help="embedding file to write")
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--max-len", type=int, default=512)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s: %(message)s")
    job = ExportJob(args.corpus, args.encoder, args.out,
                    batch_size=args.batch, max_length=args.max_len)
    try:
        out = export_content_vectors(job)
    except EncoderUnavailable as e:
        print(f"encoder unavailable: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
