import json

import pytest

from hcpw.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_analyze_reports_parameters(capsys):
    code, report = run_cli(capsys, "analyze", "--d", "10", "--k1", "2", "--k2", "2",
                           "--structured-only")
    assert code == 0
    assert report["r"] == 3 and report["g"] == 2 and report["s"] == 1.5


def test_publish_respond_verify_grade_pipeline(tmp_path, capsys):
    bundle = tmp_path / "b.hcpb"
    sealed = tmp_path / "s.hcps"
    code, _ = run_cli(capsys, "publish", "--d", "10", "--k1", "2", "--k2", "2",
                      "--n", "30", "--t", "10", "--seed", "11", "--pairs", "15",
                      "--out", str(bundle), "--sealed-out", str(sealed))
    assert code == 0

    code, resp = run_cli(capsys, "respond", "--mapping", str(sealed),
                         "--challenge", str(bundle), "--index", "2")
    assert code == 0
    digits = resp["response"]
    assert len(digits) == 10

    submission = tmp_path / "sub.json"
    submission.write_text(json.dumps({"2": digits}))
    code, verdicts = run_cli(capsys, "grade", "--bundle", str(bundle),
                             "--sealed", str(sealed), "--submission", str(submission))
    assert code == 0
    assert verdicts["results"] == [{"index": 2, "win": True}]

    wrong = str((int(digits[0]) + 1) % 10) + digits[1:]
    submission.write_text(json.dumps({"2": wrong}))
    code, verdicts = run_cli(capsys, "grade", "--bundle", str(bundle),
                             "--sealed", str(sealed), "--submission", str(submission))
    assert code == 1  # no winning submission


def test_account_record_verify_round_trip(tmp_path, capsys):
    mapping_file = tmp_path / "m.hcps"
    code, _ = run_cli(capsys, "gen-mapping", "--d", "10", "--k1", "2", "--k2", "2",
                      "--n", "30", "--seed", "21", "--out", str(mapping_file))
    assert code == 0

    challenge = tmp_path / "c.hcpb"
    account = tmp_path / "a.json"
    code, _ = run_cli(capsys, "gen-challenges", "--d", "10", "--k1", "2", "--k2", "2",
                      "--n", "30", "--seed", "22", "--out", str(challenge),
                      "--mapping", str(mapping_file), "--account-out", str(account),
                      "--hash", "sha256")
    assert code == 0

    from hcpw.accounts import AccountRecord
    from hcpw.params import SchemeParams
    from hcpw.scheme import SecretMapping, respond

    record = AccountRecord.load(account)
    p = SchemeParams(d=10, k1=2, k2=2, n=30, t=10)
    mapping = SecretMapping.load(mapping_file, params=p)
    digits = respond(mapping, record.challenge)

    code, report = run_cli(capsys, "verify", "--account", str(account),
                           "--digits", digits)
    assert code == 0 and report["ok"]

    bad = str((int(digits[0]) + 1) % 10) + digits[1:]
    code, report = run_cli(capsys, "verify", "--account", str(account), "--digits", bad)
    assert code == 1 and not report["ok"]


def test_attack_deterministic_reports(tmp_path, capsys):
    bundle = tmp_path / "b.hcpb"
    sealed = tmp_path / "s.hcps"
    run_cli(capsys, "publish", "--d", "10", "--k1", "1", "--k2", "1",
            "--n", "12", "--t", "10", "--seed", "7", "--pairs", "300",
            "--out", str(bundle), "--sealed-out", str(sealed))

    # the sealed file is not needed: the attack grades itself against the pairs
    code1, rep1 = run_cli(capsys, "attack", "gauss", "--bundle", str(bundle),
                          "--seed", "7")
    code2, rep2 = run_cli(capsys, "attack", "gauss", "--bundle", str(bundle),
                          "--seed", "7")
    assert code1 == code2 == 0
    rep1.pop("elapsed"); rep2.pop("elapsed")
    rep1["stats"].pop("elapsed", None); rep2["stats"].pop("elapsed", None)
    assert rep1 == rep2
    assert rep1["success"]


def test_usability_report_with_figure_and_csv(tmp_path, capsys):
    fig = tmp_path / "hist.png"
    csv = tmp_path / "hist.csv"
    code, report = run_cli(capsys, "usability", "--profile", "typical",
                           "--n", "30", "--draws", "3", "--seed", "1",
                           "--figure", str(fig), "--csv", str(csv))
    assert code == 0
    assert report["profile"] == "typical"
    assert fig.exists() and fig.stat().st_size > 0
    assert csv.read_text().splitlines()[0] == "rate_low,rate_high,cues"


def test_unknown_profile_is_domain_failure(capsys):
    code, report = run_cli(capsys, "usability", "--profile", "nope", "--n", "30",
                           "--draws", "1")
    assert code == 1
    assert "unknown profile" in report["error"]


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["not-a-command"])
    assert exc.value.code == 2
