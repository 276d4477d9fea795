"""extract: dump model features for a labeled dataset into a FeatPack file."""

import argparse
import sys

from .errors import ExtractionError
from .extract import ExtractionJob, extract


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="extract",
        description="Run a pre-trained model as a fixed feature extractor and "
                    "write features + labels (and optionally the source "
                    "classifier's softmax outputs) as a FeatPack file.",
    )
    ap.add_argument("--model", required=True, help="hub model id, e.g. resnet18")
    ap.add_argument("--data", required=True,
                    help="image folder (class per subdirectory) or text<TAB>label file")
    ap.add_argument("--out", required=True, help="FeatPack destination path")
    ap.add_argument("--theta", action="store_true",
                    help="also store the classifier's softmax outputs")
    ap.add_argument("--layer", choices=["penultimate", "pooled"], default="penultimate",
                    help="penultimate (vision) or pooled sequence embedding (language)")
    ap.add_argument("--batch-size", type=int, default=32)
    ap.add_argument("--weights", choices=["pretrained", "none"], default="pretrained",
                    help="'none' uses a fixed random init (offline/testing)")
    args = ap.parse_args(argv)

    try:
        job = ExtractionJob(
            model_id=args.model, input_path=args.data, output_path=args.out,
            layer=args.layer, batch_size=args.batch_size,
            emit_theta=args.theta, weights=args.weights,
        )
        path = extract(job)
    except ExtractionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
