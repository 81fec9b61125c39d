import pytest

from helpers import FIVE_CASE_CSV, five_case_db


@pytest.fixture
def worked_db():
    return five_case_db()


@pytest.fixture
def worked_csv(tmp_path):
    path = tmp_path / "worked.csv"
    path.write_text(FIVE_CASE_CSV, encoding="utf-8")
    return path
