from __future__ import annotations


def test_imports() -> None:
    import src.core  # noqa: F401
    import src.experiments.cli  # noqa: F401
    import src.fullmodel  # noqa: F401
    import src.obs  # noqa: F401
    import src.offline  # noqa: F401
    import src.online  # noqa: F401
    import src.transport  # noqa: F401
