import pathlib
import sys

# make the sibling oracle/helper modules importable as plain modules
sys.path.insert(0, str(pathlib.Path(__file__).parent))
