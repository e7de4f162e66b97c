import io
from contextlib import redirect_stderr, redirect_stdout

from gassmann.cli import main


def run_cli(*argv: str):
    """Run the CLI in-process; returns (exit_code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()
