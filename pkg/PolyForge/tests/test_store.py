from PolyForge.presets import cyclic, symmetric3
from PolyForge.store import ArtifactStore, artifact_key, get_artifact_store


def test_artifact_key_depends_on_inputs():
    p = symmetric3()
    a = [p.parse("a")]
    key = artifact_key("table", p, a, "hlt")
    assert key.startswith("table:")
    assert key == artifact_key("table", p, a, "hlt")
    assert key != artifact_key("table", p, a, "felsch")
    assert key != artifact_key("table", p, [p.parse("b")], "hlt")
    assert key != artifact_key("coordinates", p, a, "hlt")
    assert key != artifact_key("table", p, a, "hlt", "m=2")
    q = cyclic(6)
    assert artifact_key("table", q, [], "hlt") != artifact_key("table", cyclic(7), [], "hlt")


def test_put_get_stats_clear(tmp_path):
    store = ArtifactStore(str(tmp_path / "cache"), enabled=True)
    try:
        assert store.get("table:x") is None
        assert store.put("table:x", {"index": 6})
        assert store.put("coordinates:y", [1, 2, 3])
        assert store.get("table:x") == {"index": 6}
        stats = store.stats()
        assert stats["enabled"] is True
        assert stats["entries"] == 2
        assert stats["kinds"] == {"table": 1, "coordinates": 1}
        assert store.clear() == 2
        assert store.get("table:x") is None
    finally:
        store.close()


def test_artifacts_survive_reopening(tmp_path):
    directory = str(tmp_path / "cache")
    first = ArtifactStore(directory, enabled=True)
    first.put("table:z", (1, 2))
    first.close()
    second = ArtifactStore(directory, enabled=True)
    try:
        assert second.get("table:z") == (1, 2)
    finally:
        second.close()


def test_disabled_store(tmp_path):
    store = ArtifactStore(str(tmp_path / "unused"), enabled=False)
    assert not store.put("table:x", 1)
    assert store.get("table:x") is None
    assert store.clear() == 0
    assert store.stats()["entries"] == 0
    assert not (tmp_path / "unused").exists()
    assert get_artifact_store(enabled=False).enabled is False
