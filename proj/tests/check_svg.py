"""Render the planted design through the fpcontrol binary and parse the SVG."""
import subprocess
import sys
import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path

NS = "{http://www.w3.org/2000/svg}"


def run(exe, *args):
    subprocess.run([exe, *args], check=True, capture_output=True, text=True)


def main(exe):
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        run(exe, "generate", "fig2", "-o", str(d / "raw.csv"))
        run(exe, "shrink", str(d / "raw.csv"), "--spike-slab", "-o", str(d / "shrunk.csv"))
        run(exe, "plot-fig2", "--raw", str(d / "raw.csv"), "--shrunk", str(d / "shrunk.csv"), "-o", str(d / "fig2.svg"))
        root = ET.parse(d / "fig2.svg").getroot()
    assert root.tag == NS + "svg", root.tag
    markers = [e for e in root.iter() if "marker" in e.get("class", "").split()]
    assert len(markers) == 200, len(markers)
    print("svg ok:", len(markers), "markers")


if __name__ == "__main__":
    main(sys.argv[1])
