from app.workers.tasks import CellResult, SweepCell, run_cell, run_cells

__all__ = ["CellResult", "SweepCell", "run_cell", "run_cells"]
