//! Rendering of histograms and complex-amplitude views as text, CSV, JSON,
//! or SVG. All output is deterministic: fixed float precision, stable
//! ordering, no timestamps.

use anyhow::{bail, Result};
use serde_json::json;

use qdict::math::Complex;
use qdict::state::{basis_label, OutcomeHistogram, QuantumState, PRNG_NAME};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

/// How basis labels are presented. Dictionary outputs split the label into
/// `key|value` and can annotate the value with its two's-complement reading.
#[derive(Clone, Copy, Default)]
pub struct LabelStyle {
    /// Number of low bits forming the key register.
    pub key_split: Option<usize>,
    /// Interpret the value part (or the whole label) as a signed integer of
    /// this width.
    pub signed_value_width: Option<usize>,
}

impl LabelStyle {
    fn value_part(&self, index: u64, bits: usize) -> (u64, usize) {
        match self.key_split {
            Some(n) => (index >> n, bits - n),
            None => (index, bits),
        }
    }

    /// Entries ordered for display: split labels sort key-major so a
    /// dictionary reads as its key column.
    fn ordered_entries(&self, hist: &OutcomeHistogram) -> Vec<(u64, f64)> {
        let mut entries = hist.entries();
        if let Some(n) = self.key_split {
            let mask = (1u64 << n) - 1;
            entries.sort_by_key(|&(index, _)| (index & mask, index >> n));
        }
        entries
    }

    pub fn label(&self, index: u64, bits: usize) -> String {
        match self.key_split {
            Some(n) => format!(
                "{}|{}",
                basis_label(index & ((1 << n) - 1), n),
                basis_label(index >> n, bits - n)
            ),
            None => basis_label(index, bits),
        }
    }

    /// Signed decimal of the value register, when requested.
    pub fn signed_note(&self, index: u64, bits: usize) -> Option<i64> {
        let m = self.signed_value_width?;
        let (value, width) = self.value_part(index, bits);
        debug_assert_eq!(m, width);
        Some(qdict::dict::decode_value(value, m).ok()?.signed)
    }
}

fn bar(p: f64, width: usize) -> String {
    "█".repeat((p * width as f64).round() as usize)
}

pub fn histogram_text(hist: &OutcomeHistogram, style: &LabelStyle) -> String {
    let bits = hist.bits();
    let mut out = String::new();
    let label_width = style.label(0, bits).len().max(5);
    let signed = style.signed_value_width.is_some();
    let sampled = !hist.is_exact();
    out.push_str(&format!("{:label_width$}  probability", "label"));
    if sampled {
        out.push_str("      count");
    }
    if signed {
        out.push_str("   value");
    }
    out.push('\n');
    for (index, p) in style.ordered_entries(hist) {
        out.push_str(&format!(
            "{:label_width$}  {p:.6}",
            style.label(index, bits)
        ));
        if let Some(count) = hist.count(index) {
            out.push_str(&format!("  {count:9}"));
        }
        if signed {
            match style.signed_note(index, bits) {
                Some(v) => out.push_str(&format!("  {v:6}")),
                None => out.push_str(&format!("  {:6}", "?")),
            }
        }
        out.push_str(&format!("  {}\n", bar(p, 40)));
    }
    if let OutcomeHistogram::Sampled { shots, seed, .. } = hist {
        out.push_str(&format!(
            "shots: {shots}  seed: {seed}  prng: {PRNG_NAME}\n"
        ));
    }
    out
}

/// CSV with the `label,probability[,count]` schema; split labels keep the
/// `key|value` form inside the label column.
pub fn histogram_csv(hist: &OutcomeHistogram, style: &LabelStyle) -> String {
    let bits = hist.bits();
    let mut out = String::new();
    if hist.is_exact() {
        out.push_str("label,probability\n");
        for (index, p) in style.ordered_entries(hist) {
            out.push_str(&format!("{},{p:.12}\n", style.label(index, bits)));
        }
    } else {
        out.push_str("label,probability,count\n");
        for (index, p) in style.ordered_entries(hist) {
            let count = hist.count(index).unwrap_or(0);
            out.push_str(&format!("{},{p:.12},{count}\n", style.label(index, bits)));
        }
    }
    out
}

pub fn histogram_json_value(hist: &OutcomeHistogram, style: &LabelStyle) -> serde_json::Value {
    let bits = hist.bits();
    let entries: Vec<serde_json::Value> = style
        .ordered_entries(hist)
        .iter()
        .map(|&(index, p)| {
            let mut entry = json!({
                "label": style.label(index, bits),
                "index": index,
                "probability": p,
            });
            if let Some(count) = hist.count(index) {
                entry["count"] = json!(count);
            }
            if let Some(n) = style.key_split {
                entry["key"] = json!(index & ((1 << n) - 1));
                entry["value"] = json!(index >> n);
            }
            if let Some(v) = style.signed_note(index, bits) {
                entry["signed_value"] = json!(v);
            }
            entry
        })
        .collect();
    match hist {
        OutcomeHistogram::Exact { .. } => json!({
            "mode": "exact",
            "bits": bits,
            "entries": entries,
        }),
        OutcomeHistogram::Sampled { shots, seed, .. } => json!({
            "mode": "sampled",
            "bits": bits,
            "shots": shots,
            "seed": seed,
            "prng": PRNG_NAME,
            "entries": entries,
        }),
    }
}

pub fn histogram_svg(hist: &OutcomeHistogram, style: &LabelStyle, title: &str) -> String {
    let bits = hist.bits();
    let entries = style.ordered_entries(hist);
    let row_h = 22;
    let label_w = 16 + 9 * style.label(0, bits).len();
    let chart_w = 360;
    let width = label_w + chart_w + 80;
    let height = 40 + row_h * entries.len();
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         font-family=\"monospace\" font-size=\"13\">\n"
    ));
    out.push_str(&format!("<text x=\"8\" y=\"18\">{title}</text>\n"));
    for (row, (index, p)) in entries.iter().enumerate() {
        let y = 32 + row * row_h;
        let w = (p * chart_w as f64).round() as usize;
        out.push_str(&format!(
            "<text x=\"8\" y=\"{}\">{}</text>\n",
            y + 14,
            style.label(*index, bits)
        ));
        out.push_str(&format!(
            "<rect x=\"{label_w}\" y=\"{y}\" width=\"{w}\" height=\"16\" fill=\"#4472c4\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{p:.4}</text>\n",
            label_w + w + 6,
            y + 14
        ));
    }
    out.push_str("</svg>\n");
    out
}

const ARROWS: [&str; 8] = ["→", "↗", "↑", "↖", "←", "↙", "↓", "↘"];

fn phase_arrow(phase: f64) -> &'static str {
    let sector = (phase / (std::f64::consts::PI / 4.0)).round() as i64;
    ARROWS[sector.rem_euclid(8) as usize]
}

/// Readability cap for the amplitude view.
const MAX_COMPLEX_QUBITS: usize = 10;

fn check_complex_width(state: &QuantumState) -> Result<()> {
    if state.num_qubits() > MAX_COMPLEX_QUBITS {
        bail!(
            "amplitude view is capped at {MAX_COMPLEX_QUBITS} qubits ({} given); \
             reduce with a register marginal first",
            state.num_qubits()
        );
    }
    Ok(())
}

/// One row per basis label: magnitude bar plus a phase arrow.
pub fn complex_text(state: &QuantumState) -> Result<String> {
    check_complex_width(state)?;
    let bits = state.num_qubits();
    let mut out = String::new();
    out.push_str(&format!("{:bits$}  magnitude  phase      \n", "label"));
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let mag = amp.norm();
        let (phase, glyph) = if mag < 1e-9 {
            (0.0, "·")
        } else {
            (amp.arg(), phase_arrow(amp.arg()))
        };
        out.push_str(&format!(
            "{}  {mag:.6}   {phase:+.4}  {glyph}  {}\n",
            basis_label(index as u64, bits),
            bar(mag, 24),
        ));
    }
    Ok(out)
}

/// Unit-circle arrows per basis label, with a magnitude bar alongside.
pub fn complex_svg(state: &QuantumState) -> Result<String> {
    check_complex_width(state)?;
    let bits = state.num_qubits();
    let row_h = 44;
    let r = 16.0;
    let height = 30 + row_h * state.amplitudes().len();
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"420\" height=\"{height}\" \
         font-family=\"monospace\" font-size=\"13\">\n"
    ));
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let cy = 24.0 + (index * row_h) as f64 + r;
        let cx = 40.0 + r;
        let mag = amp.norm();
        out.push_str(&format!(
            "<text x=\"8\" y=\"{:.1}\">{}</text>\n",
            cy + 4.0,
            basis_label(index as u64, bits)
        ));
        out.push_str(&format!(
            "<circle cx=\"{cx:.1}\" cy=\"{cy:.1}\" r=\"{r:.1}\" fill=\"none\" stroke=\"#999\"/>\n"
        ));
        if mag > 1e-9 {
            // Arrow points along the phase, length scaled by magnitude.
            let dir = amp / Complex::new(mag, 0.0);
            out.push_str(&format!(
                "<line x1=\"{cx:.1}\" y1=\"{cy:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" \
                 stroke=\"#c00\" stroke-width=\"2\"/>\n",
                cx + r * mag * dir.re,
                cy - r * mag * dir.im
            ));
        }
        let bar_w = (mag * 200.0).round();
        out.push_str(&format!(
            "<rect x=\"100\" y=\"{:.1}\" width=\"{bar_w:.0}\" height=\"10\" fill=\"#4472c4\"/>\n",
            cy - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\">{mag:.4}</text>\n",
            104.0 + bar_w,
            cy + 4.0
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
