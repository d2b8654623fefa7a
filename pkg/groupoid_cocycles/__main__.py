"""
Delegate module command line runs to cli.py.
"""
from groupoid_cocycles.cli import APP

if __name__ == "__main__":
    APP()
