"""CLI behavior: exit codes, output formats, share handling."""

import json

import pytest

from cfs.cli import EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_USAGE, main

MOBILITY_KG = "2388.90234375"


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# validate


def test_validate_reference(fixtures_dir, capsys):
    code, out, _ = _run(capsys, "validate", str(fixtures_dir / "mobility.json"))
    assert code == EXIT_OK
    assert "valid" in out


def test_validate_broken_document(tmp_path, capsys):
    scope = {
        "level": "Scope 1",
        "list": [
            {
                "type": "component",
                "quantity": "1",
                "quantity_unit": "kWh",
                "source": {
                    "name": "G",
                    "type": "electricity",
                    "emissions": {"co2e": {"value": "1", "unit": "kg", "base unit": "kWh"}},
                },
            }
        ],
    }
    broken = tmp_path / "broken.json"
    broken.write_text(
        json.dumps({"title": "B", "scopes": [dict(scope, level=f"Scope {i}") for i in (1, 2, 3)] + [scope]})
    )
    code, out, _ = _run(capsys, "validate", str(broken))
    assert code == EXIT_DOMAIN
    assert "$.scopes" in out


def test_validate_missing_file(capsys):
    code, _, err = _run(capsys, "validate", "missing.json")
    assert code == EXIT_IO
    assert "missing.json" in err


def test_validate_strict_flags_unknown_fields(tmp_path, mobility_text, capsys):
    doc = json.loads(mobility_text)
    doc["curator"] = "someone"
    path = tmp_path / "extra.json"
    path.write_text(json.dumps(doc))
    code, out, _ = _run(capsys, "validate", str(path))
    assert code == EXIT_OK
    assert "unknown-field" in out
    code, _, _ = _run(capsys, "validate", str(path), "--strict")
    assert code == EXIT_DOMAIN


# ---------------------------------------------------------------------------
# compute


def test_compute_json(fixtures_dir, capsys):
    code, out, _ = _run(
        capsys, "compute", str(fixtures_dir / "mobility.json"), "--format", "json"
    )
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["grand_total"] == {"co2e": MOBILITY_KG}


def test_compute_json_is_byte_stable(fixtures_dir, capsys):
    _, first, _ = _run(
        capsys, "compute", str(fixtures_dir / "mobility.json"), "--format", "json"
    )
    _, second, _ = _run(
        capsys, "compute", str(fixtures_dir / "mobility.json"), "--format", "json"
    )
    assert first == second


def test_compute_table(fixtures_dir, capsys):
    code, out, _ = _run(
        capsys, "compute", str(fixtures_dir / "mobility.json"), "--format", "table"
    )
    assert code == EXIT_OK
    assert "Scope 1" in out
    assert "2.389 t" in out  # auto-scaled display


def test_compute_cycle(fixtures_dir, capsys):
    code, _, err = _run(capsys, "compute", str(fixtures_dir / "cycle-a.json"))
    assert code == EXIT_DOMAIN
    assert "cycle" in err
    assert "cycle-a.json" in err and "cycle-b.json" in err


def test_compute_share_url(fixtures_dir, capsys):
    code, url, _ = _run(capsys, "encode", str(fixtures_dir / "mobility.json"))
    assert code == EXIT_OK
    code, out, _ = _run(capsys, "compute", url.strip(), "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["grand_total"] == {"co2e": MOBILITY_KG}


def test_compute_remote(fixture_host, capsys):
    code, out, _ = _run(capsys, "compute", fixture_host.url("mobility"), "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["grand_total"] == {"co2e": MOBILITY_KG}


def test_compute_fetch_failure(capsys):
    code, _, err = _run(capsys, "compute", "http://127.0.0.1:1/none.json", "--timeout", "1")
    assert code == EXIT_IO
    assert "error" in err


def test_compute_with_units_extension(fixtures_dir, tmp_path, capsys):
    doc = {
        "title": "Miles",
        "scopes": [
            {
                "level": "Scope 1",
                "list": [
                    {
                        "type": "component",
                        "quantity": "100",
                        "quantity_unit": "mi",
                        "source": {
                            "name": "Fuel",
                            "type": "gasoline",
                            "emissions": {
                                "co2e": {"value": "0.25", "unit": "kg", "base unit": "km"}
                            },
                        },
                    }
                ],
            }
        ],
    }
    path = tmp_path / "miles.json"
    path.write_text(json.dumps(doc))
    code, _, _ = _run(capsys, "compute", str(path))
    assert code == EXIT_DOMAIN  # "mi" unknown without the extension
    code, out, _ = _run(
        capsys,
        "compute",
        str(path),
        "--units",
        str(fixtures_dir / "extras" / "units-ext.json"),
        "--format",
        "json",
    )
    assert code == EXIT_OK
    # 100 mi, 1 mi = 1.609344 km, * 0.25 kg/km
    assert json.loads(out)["grand_total"] == {"co2e": "40.2336"}


# ---------------------------------------------------------------------------
# benchmark


def test_benchmark_self(fixtures_dir, capsys):
    mobility = str(fixtures_dir / "mobility.json")
    code, out, _ = _run(capsys, "benchmark", mobility, mobility, "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["ratios"]["co2e"] == ["1", "1"]


def test_benchmark_ratio_two(fixtures_dir, capsys):
    code, out, _ = _run(
        capsys,
        "benchmark",
        str(fixtures_dir / "mobility.json"),
        str(fixtures_dir / "mobility-2x.json"),
        "--format",
        "json",
    )
    assert code == EXIT_OK
    assert json.loads(out)["ratios"]["co2e"] == ["1", "2"]


def test_benchmark_single_input_is_usage_error(fixtures_dir, capsys):
    code, _, err = _run(capsys, "benchmark", str(fixtures_dir / "mobility.json"))
    assert code == EXIT_USAGE
    assert "at least 2" in err


def test_benchmark_no_common_keys(fixtures_dir, capsys):
    code, _, err = _run(
        capsys,
        "benchmark",
        str(fixtures_dir / "disjoint-co2.json"),
        str(fixtures_dir / "disjoint-ch4.json"),
    )
    assert code == EXIT_DOMAIN
    assert "no emission key" in err


# ---------------------------------------------------------------------------
# encode / decode


def test_encode_decode_round_trip(fixtures_dir, capsys):
    from cfs.schema import canonical_json, parse_scenario

    mobility = fixtures_dir / "mobility.json"
    code, url, _ = _run(capsys, "encode", str(mobility))
    assert code == EXIT_OK
    code, out, _ = _run(capsys, "decode", url.strip())
    assert code == EXIT_OK
    expected = canonical_json(parse_scenario(mobility.read_text(), "file:///m.json"))
    assert out.strip() == expected


def test_decode_garbage(capsys):
    code, _, err = _run(capsys, "decode", "?data=!!!")
    assert code == EXIT_DOMAIN
    assert "base64" in err


def test_decode_id_with_base(fixture_host, capsys):
    code, out, _ = _run(
        capsys,
        "decode",
        "https://viewer.example.org/?id=mobility",
        "--base",
        f"{fixture_host.base}/scenarios",
    )
    assert code == EXIT_OK
    assert json.loads(out)["title"] == "Mobility"


def test_decode_id_without_base(capsys):
    code, _, err = _run(capsys, "decode", "?id=mobility")
    assert code == EXIT_DOMAIN
    assert "--base" in err


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == EXIT_USAGE


# ---------------------------------------------------------------------------
# serve


def test_serve_bind_failure(capsys):
    import socket

    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    port = blocker.getsockname()[1]
    try:
        code, _, err = _run(capsys, "serve", "--port", str(port))
        assert code == EXIT_IO
        assert "cannot serve" in err
    finally:
        blocker.close()
