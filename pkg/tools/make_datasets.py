"""Regenerate the bundled stand-in datasets (deterministic).

    python3 tools/make_datasets.py
"""

from pathlib import Path

from netgauss.datasets import synthetic_compounds, synthetic_protein_network, write_compounds
from netgauss.graph import write_pajek

DATA = Path(__file__).resolve().parents[1] / "src" / "netgauss" / "data"


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    write_compounds(synthetic_compounds(), DATA / "compounds_synthetic.txt",
                    header="synthetic stand-in: 188 compounds (125 class 1, 63 class 0)\n"
                           "atom labels C N O F I Cl Br = 1..7; bond labels aromatic single double triple = 1..4")
    net = synthetic_protein_network()
    path = DATA / "protein_synthetic.net"
    write_pajek(net, path)
    text = path.read_text()
    path.write_text(f"% synthetic stand-in: {net.n} proteins in 13 classes, {net.edge_count} interactions\n"
                    "% vertex lines: index \"name\" class\n" + text)
    print(f"wrote {DATA}")


if __name__ == "__main__":
    main()
