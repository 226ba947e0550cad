from rich.console import Console
from rich.table import Table
from rich.align import Align
from rich import box

from typing import Optional, List, Any

console = Console()


def tabulate(cols: List[str],  # List of column names
             rows: List[List[Any]],
             title: Optional[str] = ':satellite_antenna: Sum rate summary',
             caption: Optional[str] = None,
             show_header: Optional[bool] = True,
             header_style: Optional[str] = 'bold turquoise4',
             numeric_format: str = '{:.4f}'):
    """
    Create table for displaying results. Floats are rendered with
    `numeric_format`, everything else with str().
    """
    table = Table(show_header=show_header, header_style=header_style)

    table.title = title
    table.box = box.SQUARE_DOUBLE_HEAD

    # add column headers
    for col in cols:
        table.add_column(col, justify='right' if col != cols[0] else 'left')

    # add rows
    for row in rows:
        table.add_row(*(numeric_format.format(x) if isinstance(x, float) else str(x)
                        for x in row))

    if caption is not None:
        table.caption = caption

    # center output in console
    return Align.center(table)


def display(cols: List[str], rows: List[List[Any]], **kwargs):
    console.print(tabulate(cols, rows, **kwargs))
