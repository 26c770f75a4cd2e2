"""Single-line terminal progress bar for long trial loops."""

import sys


class ProgressBar:
    """
    Callable progress sink: ``bar(done, total)`` redraws ``label: [####----] done/total``
    in place; ``finish()`` ends the line. A quiet bar draws nothing.
    """

    def __init__(self, label: str, bar_width: int = 40, quiet: bool = False, stream=None):
        self.label = label
        self.bar_width = bar_width
        self.quiet = quiet
        self.stream = stream or sys.stdout
        self._drawn = False

    def __call__(self, done: int, total: int) -> None:
        if self.quiet or not total:
            return
        filled = int(self.bar_width * done / total)
        bar = "#" * filled + "-" * (self.bar_width - filled)
        self.stream.write(f"\r{self.label}: [{bar}] {done}/{total}")
        self.stream.flush()
        self._drawn = True

    def finish(self) -> None:
        if self._drawn:
            self.stream.write("\n")
            self.stream.flush()
            self._drawn = False
