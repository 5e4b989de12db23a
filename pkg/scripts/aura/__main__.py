"""Allow running as: python -m scripts.aura"""

from .cli import run

if __name__ == "__main__":
    run()
