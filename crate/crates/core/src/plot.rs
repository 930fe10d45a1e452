//! Four-panel figure output, one SVG per panel.
//!
//! 1. kinetic energy and objective, each divided by its initial value;
//! 2. body rates against time;
//! 3. the `(ω2, ω3)` phase portrait;
//! 4. the `(I2, I3)` inertia path.

use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::error::{Error, Result};
use crate::simulation::Trace;

/// Axis ranges of one panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Frame {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self {
            x: (x0, x1),
            y: (y0, y1),
        }
    }
}

/// Reference frames of the built-in scenarios, `None` where auto-scaled.
pub fn reference_frames(scenario: &str) -> [Option<Frame>; 4] {
    let f = |x0, x1, y0, y1| Some(Frame::new(x0, x1, y0, y1));
    match scenario {
        "alignment" => [
            None,
            f(0.0, 40.0, -7.0, 10.0),
            f(-5.0, 5.0, -5.0, 5.0),
            f(-0.2, 2.5, -0.2, 2.0),
        ],
        "passive" => [
            f(0.0, 40.0, 0.0, 1.0),
            f(0.0, 40.0, -5.0, 10.0),
            f(-5.0, 5.0, -5.0, 5.0),
            f(-0.2, 6.0, -0.2, 6.0),
        ],
        "precession" => [
            f(0.0, 80.0, 0.0, 1.0),
            f(0.0, 80.0, -5.0, 10.0),
            f(-5.0, 5.0, -5.0, 5.0),
            f(-0.2, 6.0, -0.2, 6.0),
        ],
        "combined" => [
            f(0.0, 40.0, 0.0, 1.0),
            f(0.0, 40.0, -5.0, 10.0),
            f(-5.0, 5.0, -5.0, 5.0),
            f(-0.2, 4.0, -0.2, 3.0),
        ],
        _ => [None; 4],
    }
}

/// Padded bounding box of the plotted series.
fn auto_frame(series: &[&[(f64, f64)]]) -> Frame {
    let mut x = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y = (f64::INFINITY, f64::NEG_INFINITY);
    for &(px, py) in series.iter().flat_map(|s| s.iter()) {
        if px.is_finite() && py.is_finite() {
            x = (x.0.min(px), x.1.max(px));
            y = (y.0.min(py), y.1.max(py));
        }
    }
    let pad = |(lo, hi): (f64, f64)| {
        if !lo.is_finite() {
            return (-1.0, 1.0);
        }
        let span = hi - lo;
        let m = if span > 0.0 {
            0.05 * span
        } else {
            lo.abs().max(1.0) * 0.05
        };
        (lo - m, hi + m)
    };
    Frame {
        x: pad(x),
        y: pad(y),
    }
}

fn normalizer(first: f64) -> f64 {
    if first.abs() > 0.0 {
        first
    } else {
        1.0
    }
}

/// Keeps at most `limit` evenly spaced rows, always including the last.
fn decimate(len: usize, limit: usize) -> Vec<usize> {
    if len <= limit {
        return (0..len).collect();
    }
    let stride = len.div_ceil(limit);
    let mut idx: Vec<usize> = (0..len).step_by(stride).collect();
    if idx.last() != Some(&(len - 1)) {
        idx.push(len - 1);
    }
    idx
}

const MAX_POINTS: usize = 4000;

struct Series {
    label: &'static str,
    color: RGBColor,
    points: Vec<(f64, f64)>,
}

fn draw(
    path: &Path,
    caption: &str,
    labels: (&str, &str),
    frame: Frame,
    series: &[Series],
) -> Result<()> {
    let err = |e: &dyn std::fmt::Display| Error::Plot(format!("{}: {e}", path.display()));
    let root = SVGBackend::new(path, (640, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(caption, ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(48)
        .build_cartesian_2d(frame.x.0..frame.x.1, frame.y.0..frame.y.1)
        .map_err(|e| err(&e))?;
    chart
        .configure_mesh()
        .x_desc(labels.0)
        .y_desc(labels.1)
        .draw()
        .map_err(|e| err(&e))?;
    for s in series {
        let color = s.color;
        chart
            .draw_series(LineSeries::new(
                s.points.iter().copied(),
                color.stroke_width(1),
            ))
            .map_err(|e| err(&e))?
            .label(s.label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color));
    }
    if series.len() > 1 {
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(|e| err(&e))?;
    }
    root.present().map_err(|e| err(&e))?;
    Ok(())
}

/// Writes `<scenario>_panel1.svg` … `<scenario>_panel4.svg` into `dir`.
pub fn emit_plots(trace: &Trace, dir: &Path) -> Result<Vec<PathBuf>> {
    emit_plots_with(trace, dir, reference_frames(&trace.scenario))
}

pub fn emit_plots_with(
    trace: &Trace,
    dir: &Path,
    frames: [Option<Frame>; 4],
) -> Result<Vec<PathBuf>> {
    let first = trace.rows.first().ok_or(Error::EmptyTrace)?;
    std::fs::create_dir_all(dir)?;
    let idx = decimate(trace.rows.len(), MAX_POINTS);
    let pick = |f: &dyn Fn(usize) -> (f64, f64)| idx.iter().map(|&i| f(i)).collect::<Vec<_>>();
    let rows = &trace.rows;

    let e0 = normalizer(first.kinetic_energy);
    let v0 = normalizer(first.value);
    let panels: [(&str, (&str, &str), Vec<Series>); 4] = [
        (
            "normalized energy and objective",
            ("t [s]", "relative value"),
            vec![
                Series {
                    label: "E_K",
                    color: BLUE,
                    points: pick(&|i| (rows[i].t, rows[i].kinetic_energy / e0)),
                },
                Series {
                    label: "V",
                    color: RED,
                    points: pick(&|i| (rows[i].t, rows[i].value / v0)),
                },
            ],
        ),
        (
            "body rates",
            ("t [s]", "rad/s"),
            vec![
                Series {
                    label: "w1",
                    color: RED,
                    points: pick(&|i| (rows[i].t, rows[i].omega.x)),
                },
                Series {
                    label: "w2",
                    color: GREEN,
                    points: pick(&|i| (rows[i].t, rows[i].omega.y)),
                },
                Series {
                    label: "w3",
                    color: BLUE,
                    points: pick(&|i| (rows[i].t, rows[i].omega.z)),
                },
            ],
        ),
        (
            "(w2, w3)",
            ("w2", "w3"),
            vec![Series {
                label: "(w2, w3)",
                color: BLUE,
                points: pick(&|i| (rows[i].omega.y, rows[i].omega.z)),
            }],
        ),
        (
            "(I2, I3)",
            ("I2", "I3"),
            vec![Series {
                label: "(I2, I3)",
                color: BLUE,
                points: pick(&|i| (rows[i].i2, rows[i].i3)),
            }],
        ),
    ];

    let stem = file_stem(&trace.scenario);
    let mut paths = Vec::with_capacity(4);
    for (k, ((caption, labels, series), frame)) in panels.iter().zip(frames).enumerate() {
        let frame = frame.unwrap_or_else(|| {
            let pts: Vec<&[(f64, f64)]> = series.iter().map(|s| s.points.as_slice()).collect();
            auto_frame(&pts)
        });
        let path = dir.join(format!("{stem}_panel{}.svg", k + 1));
        draw(&path, caption, *labels, frame, series)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Scenario name reduced to characters safe in a file name.
pub fn file_stem(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() {
        "scenario".into()
    } else {
        s
    }
}
