import sys
from pathlib import Path

# Make sibling helper modules (golden, treegen) importable from tests.
sys.path.insert(0, str(Path(__file__).parent))
