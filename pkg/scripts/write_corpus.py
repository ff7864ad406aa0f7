"""Write the default verification corpus as edge-list files plus a manifest.

    python scripts/write_corpus.py corpus/
    subset-glauber verify-all --corpus corpus/manifest.json
"""

import argparse

from subset_glauber.corpus import default_corpus, isomorphism_representatives, write_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out_dir")
    ap.add_argument("--max-labeled-n", type=int, default=5)
    ap.add_argument("--max-edges", type=int, default=8, help="size limit for the named families")
    ap.add_argument("--unlabeled", action="store_true", help="keep one graph per isomorphism class")
    args = ap.parse_args()
    graphs = default_corpus(args.max_labeled_n, args.max_edges)
    if args.unlabeled:
        graphs = isomorphism_representatives(graphs)
    path = write_corpus(args.out_dir, graphs)
    print(f"{len(graphs)} graphs -> {path}")


if __name__ == "__main__":
    main()
