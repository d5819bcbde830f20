mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{fixture, noisy_tones, pcm_to_f64, tone, tone_level, FS};
use notchkit::io::{read_wav, write_wav, AudioBuffer, CoefficientFile};
use tempfile::TempDir;

fn notchkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_notchkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn design(dir: &TempDir, name: &str, notches: &[&str]) -> std::path::PathBuf {
    let out = dir.path().join(name);
    let mut args = vec!["design"];
    for n in notches {
        args.extend(["--notch", n]);
    }
    args.extend(["--fs", "7400", "--r", "0.99", "--out", p(&out)]);
    let o = notchkit(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn write_pcm(dir: &TempDir, name: &str, rate: u32, samples: Vec<i16>) -> std::path::PathBuf {
    let path = dir.path().join(name);
    write_wav(&path, &AudioBuffer::new(rate, samples).unwrap()).unwrap();
    path
}

#[test]
fn design_writes_reference_coefficients() {
    let dir = TempDir::new().unwrap();
    let path = design(&dir, "c.txt", &["315", "2500"]);
    let text = fs::read_to_string(&path).unwrap();
    for needle in [
        "a1 = -1.928890613985845",
        "b1 = -1.909601707845986",
        "b2 = 9.80099999999999",
        "a1 = 1.048614567114463",
        "b1 = 1.038128421443318",
        "a1_q = -63206",
        "b2_q = 32115",
        "stable = true",
    ] {
        assert!(text.contains(needle), "missing {needle}:\n{text}");
    }
}

#[test]
fn design_quarter_rate_has_zero_a1() {
    let dir = TempDir::new().unwrap();
    let file = CoefficientFile::read(&design(&dir, "q.txt", &["1850"])).unwrap();
    assert_eq!(file.sections[0].biquad.a1, 0.0);
    assert_eq!(file.sections[0].quantized.a1, 0);
}

#[test]
fn design_rejects_notch_above_nyquist() {
    let o = notchkit(&["design", "--notch", "4000", "--fs", "7400"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Nyquist"));
}

#[test]
fn argument_errors_exit_2() {
    assert_eq!(code(&notchkit(&["design"])), 2);
    assert_eq!(code(&notchkit(&["design", "--notch", "abc"])), 2);
    assert_eq!(code(&notchkit(&["bogus"])), 2);
    assert_eq!(code(&notchkit(&["design", "--notch", "315", "--rounding", "sideways"])), 2);
}

#[test]
fn analyze_finds_both_notches() {
    let dir = TempDir::new().unwrap();
    let coeffs = design(&dir, "c.txt", &["315", "2500"]);
    let csv = dir.path().join("r.csv");
    let o = notchkit(&["analyze", p(&coeffs), "--out", p(&csv)]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("minimum at 315 Hz"), "{stdout}");
    assert!(stdout.contains("minimum at 2500 Hz"), "{stdout}");

    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["freq_hz", "magnitude", "magnitude_db", "phase_rad"]
    );
    let rows: Vec<(f64, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap())
        })
        .collect();
    // interior local minima of the magnitude column
    let minima: Vec<f64> = rows
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .map(|w| w[1].0)
        .collect();
    assert_eq!(minima, [315.0, 2500.0]);
}

#[test]
fn analyze_unity_file_is_flat() {
    let dir = TempDir::new().unwrap();
    let coeffs = dir.path().join("u.txt");
    fs::write(&coeffs, "sample_rate = 7400\n[section]\na0 = 1\na1 = 0\na2 = 0\nb1 = 0\nb2 = 0\n").unwrap();
    let o = notchkit(&["analyze", p(&coeffs), "--points", "64"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), 64);
    assert!(lines.iter().all(|l| l.split(',').nth(1) == Some("1")));
}

#[test]
fn analyze_unstable_file_exits_4() {
    let dir = TempDir::new().unwrap();
    let coeffs = dir.path().join("bad.txt");
    fs::write(&coeffs, "sample_rate = 7400\n[section]\na0 = 1\na1 = 0\na2 = 1\nb1 = 0\nb2 = 1.0201\n").unwrap();
    let o = notchkit(&["analyze", p(&coeffs)]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn analyze_malformed_file_reports_line() {
    let dir = TempDir::new().unwrap();
    let coeffs = dir.path().join("bad.txt");
    fs::write(&coeffs, "sample_rate = 7400\n[section]\na0 = 1\na1 = x\n").unwrap();
    let o = notchkit(&["analyze", p(&coeffs)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn design_analyze_round_trip_is_lossless() {
    let dir = TempDir::new().unwrap();
    let coeffs = design(&dir, "c.txt", &["315", "2500", "1000"]);
    let file = CoefficientFile::read(&coeffs).unwrap();
    for (s, f) in file.sections.iter().zip([315.0, 2500.0, 1000.0]) {
        let b = notchkit::design_notch(&notchkit::NotchSpec::new(f, 7400.0, 0.99).unwrap());
        assert_eq!(s.biquad, b);
        assert_eq!(s.quantized, notchkit::quantize(&b, notchkit::FixedFormat::default()).unwrap());
    }
}

#[test]
fn filter_attenuates_tones_with_both_engines() {
    let dir = TempDir::new().unwrap();
    let coeffs = design(&dir, "c.txt", &["315", "2500"]);
    let input = write_pcm(&dir, "in.wav", 7400, noisy_tones(3.0));
    let x = pcm_to_f64(&read_wav(&input).unwrap().samples);
    for (engine, min_drop) in [("float", 80.0), ("fixed", 30.0)] {
        let out = dir.path().join(format!("{engine}.wav"));
        let o = notchkit(&["filter", "--input", p(&input), "--coefficients", p(&coeffs), "--engine", engine, "--output", p(&out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let y = pcm_to_f64(&read_wav(&out).unwrap().samples);
        let tail = 7400..x.len();
        for f in [315.0, 2500.0] {
            let drop = tone_level(&x[tail.clone()], f, FS) - tone_level(&y[tail.clone()], f, FS);
            assert!(drop >= min_drop, "{engine} {f} Hz: {drop:.1} dB");
        }
    }
}

#[test]
fn filter_silence_stays_silent() {
    let dir = TempDir::new().unwrap();
    let coeffs = design(&dir, "c.txt", &["315", "2500"]);
    let input = write_pcm(&dir, "in.wav", 7400, vec![0; 5000]);
    for engine in ["float", "fixed"] {
        let out = dir.path().join("out.wav");
        let o = notchkit(&["filter", "--input", p(&input), "--coefficients", p(&coeffs), "--engine", engine, "--output", p(&out)]);
        assert_eq!(code(&o), 0);
        assert!(read_wav(&out).unwrap().samples.iter().all(|&s| s == 0));
    }
}

#[test]
fn filter_unity_is_lossless() {
    let dir = TempDir::new().unwrap();
    let coeffs = dir.path().join("u.txt");
    fs::write(&coeffs, "sample_rate = 7400\n[section]\na0 = 1\na1 = 0\na2 = 0\nb1 = 0\nb2 = 0\n").unwrap();
    let samples: Vec<i16> = (0..65536).map(|k| (k - 32768) as i16).collect();
    let input = write_pcm(&dir, "in.wav", 7400, samples.clone());
    let run = |engine: &str| {
        let out = dir.path().join(format!("{engine}.wav"));
        let o = notchkit(&["filter", "--input", p(&input), "--coefficients", p(&coeffs), "--engine", engine, "--output", p(&out)]);
        assert_eq!(code(&o), 0);
        read_wav(&out).unwrap().samples
    };
    assert_eq!(run("float"), samples);
    let requantized: Vec<i16> = samples
        .iter()
        .map(|&s| notchkit::engine::sample_from_datapath(notchkit::engine::sample_to_datapath(s)))
        .collect();
    assert_eq!(run("fixed"), requantized);
}

#[test]
fn filter_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let coeffs = design(&dir, "c.txt", &["315"]);
    let out = dir.path().join("out.wav");

    let wrong_rate = write_pcm(&dir, "r.wav", 8000, vec![0; 100]);
    let o = notchkit(&["filter", "--input", p(&wrong_rate), "--coefficients", p(&coeffs), "--output", p(&out)]);
    assert_eq!(code(&o), 3);

    let stereo = dir.path().join("s.wav");
    let spec = hound::WavSpec { channels: 2, sample_rate: 7400, bits_per_sample: 16, sample_format: hound::SampleFormat::Int };
    let mut w = hound::WavWriter::create(&stereo, spec).unwrap();
    for _ in 0..20 {
        w.write_sample(0i16).unwrap();
    }
    w.finalize().unwrap();
    let o = notchkit(&["filter", "--input", p(&stereo), "--coefficients", p(&coeffs), "--output", p(&out)]);
    assert_eq!(code(&o), 3);

    let garbage = dir.path().join("g.wav");
    fs::write(&garbage, b"not a wav file").unwrap();
    let o = notchkit(&["filter", "--input", p(&garbage), "--coefficients", p(&coeffs), "--output", p(&out)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn spectrum_peak_and_bad_size() {
    let dir = TempDir::new().unwrap();
    let samples: Vec<i16> = tone(315.0, 32767.0 / 32768.0, 16384, FS)
        .iter()
        .map(|v| (v * 32768.0).round() as i16)
        .collect();
    let input = write_pcm(&dir, "sine.wav", 7400, samples);
    let csv_path = dir.path().join("s.csv");
    let o = notchkit(&["spectrum", p(&input), "--n-fft", "1024", "--out", p(&csv_path)]);
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["freq_hz", "magnitude_db"]);
    let rows: Vec<(f64, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 513);
    assert_eq!(rows.last().unwrap().0, 3700.0);
    let peak = rows.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(peak.0, 317.96875);

    let o = notchkit(&["spectrum", p(&input), "--n-fft", "1000"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn spectrum_of_silence_is_floor() {
    let dir = TempDir::new().unwrap();
    let input = write_pcm(&dir, "z.wav", 7400, vec![0; 4096]);
    let o = notchkit(&["spectrum", p(&input), "--n-fft", "256"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",-inf")), "{text}");
}

#[test]
fn spectrum_of_white_noise_is_flat() {
    use rand::{rngs::StdRng, SeedableRng};
    let dir = TempDir::new().unwrap();
    let mut rng = StdRng::seed_from_u64(21);
    let samples: Vec<i16> = common::gaussian(&mut rng, 256 * 65)
        .iter()
        .map(|v| (v * 3000.0).round() as i16)
        .collect();
    let input = write_pcm(&dir, "n.wav", 7400, samples);
    let out = dir.path().join("n.csv");
    assert_eq!(code(&notchkit(&["spectrum", p(&input), "--n-fft", "512", "--out", p(&out)])), 0);
    let levels: Vec<f64> = csv::Reader::from_path(&out)
        .unwrap()
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    let inner = &levels[1..levels.len() - 1];
    let mean = inner.iter().sum::<f64>() / inner.len() as f64;
    assert!(inner.iter().all(|l| (l - mean).abs() <= 3.0));
}

#[test]
fn acoustics_designs_studio_filters() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("studio.txt");
    let o = notchkit(&["acoustics", p(&fixture("studio_insulation.csv")), "--fs", "7400", "--r", "0.99", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("resonance dip: 315 Hz"), "{stdout}");
    assert!(stdout.contains("coincidence dip: 2500 Hz"), "{stdout}");
    let designed = design(&dir, "ref.txt", &["315", "2500"]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&designed).unwrap());
}

#[test]
fn acoustics_flat_curve_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let curve = dir.path().join("flat.csv");
    fs::write(&curve, "freq_hz,r_db\n100,40\n200,40\n400,40\n800,40\n").unwrap();
    let out = dir.path().join("none.txt");
    let o = notchkit(&["acoustics", p(&curve), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("no dips found"));
    assert!(!out.exists());
}

#[test]
fn acoustics_accepts_dip_just_below_nyquist() {
    let dir = TempDir::new().unwrap();
    let curve = dir.path().join("high.csv");
    fs::write(&curve, "freq_hz,r_db\n400,30\n500,20\n630,30\n3150,45\n3600,30\n3650,45\n").unwrap();
    let o = notchkit(&["acoustics", p(&curve), "--fs", "7400"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("notch spec: 3600 Hz"));

    let o = notchkit(&["acoustics", p(&curve), "--fs", "7000"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("3600"));
}

#[test]
fn acoustics_bad_csv_is_data_error() {
    let dir = TempDir::new().unwrap();
    let curve = dir.path().join("bad.csv");
    fs::write(&curve, "freq_hz,r_db\n100,40\n200,oops\n400,40\n").unwrap();
    let o = notchkit(&["acoustics", p(&curve)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let coeffs = design(&dir, "c.txt", &["315", "2500"]);
    let again = design(&dir, "c2.txt", &["315", "2500"]);
    assert_eq!(fs::read(&coeffs).unwrap(), fs::read(&again).unwrap());

    let input = write_pcm(&dir, "in.wav", 7400, noisy_tones(1.0));
    let mut files = Vec::new();
    for k in 0..2 {
        let wav = dir.path().join(format!("out{k}.wav"));
        let resp = dir.path().join(format!("resp{k}.csv"));
        let spec = dir.path().join(format!("spec{k}.csv"));
        for args in [
            vec!["filter", "--input", p(&input), "--coefficients", p(&coeffs), "--output", p(&wav)],
            vec!["analyze", p(&coeffs), "--out", p(&resp)],
            vec!["spectrum", p(&wav), "--out", p(&spec)],
        ] {
            assert_eq!(code(&notchkit(&args)), 0);
        }
        files.push([wav, resp, spec].map(|f| fs::read(f).unwrap()));
    }
    assert_eq!(files[0], files[1]);
}
