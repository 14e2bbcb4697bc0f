"""Allow `python -m centering`."""

from .cli import main

if __name__ == "__main__":
    main()
