//! Result export: trajectory and residual CSV, a metrics JSON document and a
//! self-contained SVG figure with the XY paths and residual traces.

use crate::metrics::MetricsReport;
use crate::simulation::{LogRow, TrajectoryLog};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// I/O failures carry the offending path.
#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExportError + '_ {
    move |source| ExportError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// One trajectory CSV record; the column order is part of the file contract.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub p1x: f64,
    pub p1y: f64,
    pub th1: f64,
    pub p2x: f64,
    pub p2y: f64,
    pub th2: f64,
    pub v1x: f64,
    pub v1y: f64,
    pub w1: f64,
    pub v2x: f64,
    pub v2y: f64,
    pub w2: f64,
    pub r_axis: f64,
    pub r_align: f64,
    pub r_dist: f64,
    pub r_soft: f64,
    pub phase: String,
    pub solver_status: String,
}

impl From<&LogRow> for TrajectoryRecord {
    fn from(row: &LogRow) -> Self {
        TrajectoryRecord {
            t: row.t,
            p1x: row.state.r1.px,
            p1y: row.state.r1.py,
            th1: row.state.r1.theta,
            p2x: row.state.r2.px,
            p2y: row.state.r2.py,
            th2: row.state.r2.theta,
            v1x: row.input.u1.vx,
            v1y: row.input.u1.vy,
            w1: row.input.u1.omega,
            v2x: row.input.u2.vx,
            v2y: row.input.u2.vy,
            w2: row.input.u2.omega,
            r_axis: row.residuals.axis,
            r_align: row.residuals.align,
            r_dist: row.residuals.dist,
            r_soft: row.residuals.soft,
            phase: row.phase.as_str().to_string(),
            solver_status: row.status.as_str().to_string(),
        }
    }
}

/// Writes the full per-step trajectory table.
pub fn write_trajectory_csv(
    path: impl AsRef<Path>,
    log: &TrajectoryLog,
) -> Result<(), ExportError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| ExportError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    })?;
    for row in &log.rows {
        writer
            .serialize(TrajectoryRecord::from(row))
            .map_err(|e| ExportError::Io {
                path: path.display().to_string(),
                source: std::io::Error::other(e),
            })?;
    }
    writer.flush().map_err(io_err(path))
}

/// Reads a trajectory table back; floats round-trip exactly.
pub fn read_trajectory_csv(path: impl AsRef<Path>) -> Result<Vec<TrajectoryRecord>, ExportError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| ExportError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    reader
        .deserialize()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ExportError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
}

/// Writes the compact residual table (`t` plus the four coupling residuals).
pub fn write_residuals_csv(path: impl AsRef<Path>, log: &TrajectoryLog) -> Result<(), ExportError> {
    let path = path.as_ref();
    let mut out = String::from("t,r_axis,r_align,r_dist,r_soft\n");
    for row in &log.rows {
        let r = &row.residuals;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.t, r.axis, r.align, r.dist, r.soft
        ));
    }
    std::fs::write(path, out).map_err(io_err(path))
}

/// Writes the metrics report as pretty-printed JSON.
pub fn write_metrics_json(
    path: impl AsRef<Path>,
    report: &MetricsReport,
) -> Result<(), ExportError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(report).expect("report serialization is infallible");
    std::fs::write(path, text + "\n").map_err(io_err(path))
}

// ---------------------------------------------------------------------------
// SVG figure.
// ---------------------------------------------------------------------------

const COLOR_R1: &str = "#1f77b4";
const COLOR_R2: &str = "#d62728";
const RESIDUAL_SERIES: [(&str, &str); 4] = [
    ("r_axis", "#9467bd"),
    ("r_align", "#2ca02c"),
    ("r_dist", "#ff7f0e"),
    ("r_soft", "#17becf"),
];

struct Panel {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl Panel {
    /// Maps data coordinates into this panel given data ranges.
    fn map(&self, v: (f64, f64), xr: (f64, f64), yr: (f64, f64)) -> (f64, f64) {
        let sx = self.w / (xr.1 - xr.0).max(1e-12);
        let sy = self.h / (yr.1 - yr.0).max(1e-12);
        (
            self.x + (v.0 - xr.0) * sx,
            self.y + self.h - (v.1 - yr.0) * sy,
        )
    }
}

fn polyline(points: &[(f64, f64)], color: &str, width: f64) -> String {
    let pts: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" points=\"{}\"/>\n",
        pts.join(" ")
    )
}

fn text(x: f64, y: f64, size: u32, color: &str, s: &str) -> String {
    format!("<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" font-size=\"{size}\" fill=\"{color}\">{s}</text>\n")
}

/// Renders the run as a standalone SVG: XY paths of both robots with dock and
/// undock markers on top, residual-versus-time traces below.
pub fn render_svg(log: &TrajectoryLog) -> String {
    let width = 860.0;
    let height = 880.0;
    let xy = Panel { x: 60.0, y: 40.0, w: 740.0, h: 380.0 };
    let angle_panel = Panel { x: 60.0, y: 480.0, w: 740.0, h: 160.0 };
    let dist_panel = Panel { x: 60.0, y: 690.0, w: 740.0, h: 160.0 };

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );

    // --- XY panel ---------------------------------------------------------
    let p1: Vec<(f64, f64)> = log.rows.iter().map(|r| (r.state.r1.px, r.state.r1.py)).collect();
    let p2: Vec<(f64, f64)> = log.rows.iter().map(|r| (r.state.r2.px, r.state.r2.py)).collect();
    let all = p1.iter().chain(&p2);
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let pad = 0.5;
    // Equal scale on both axes so the geometry is not distorted.
    let span_x = (xmax - xmin + 2.0 * pad).max(1e-6);
    let span_y = (ymax - ymin + 2.0 * pad).max(1e-6);
    let scale = (xy.w / span_x).min(xy.h / span_y);
    let cx = 0.5 * (xmin + xmax);
    let cy = 0.5 * (ymin + ymax);
    let half_w = 0.5 * xy.w / scale;
    let half_h = 0.5 * xy.h / scale;
    let xr = (cx - half_w, cx + half_w);
    let yr = (cy - half_h, cy + half_h);

    svg.push_str(&format!(
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#cccccc\"/>\n",
        xy.x, xy.y, xy.w, xy.h
    ));
    let m1: Vec<(f64, f64)> = p1.iter().map(|&v| xy.map(v, xr, yr)).collect();
    let m2: Vec<(f64, f64)> = p2.iter().map(|&v| xy.map(v, xr, yr)).collect();
    svg.push_str(&polyline(&m1, COLOR_R1, 1.8));
    svg.push_str(&polyline(&m2, COLOR_R2, 1.8));

    // Start markers.
    for (pts, color) in [(&m1, COLOR_R1), (&m2, COLOR_R2)] {
        if let Some(&(x, y)) = pts.first() {
            svg.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"8\" height=\"8\" fill=\"{color}\"/>\n",
                x - 4.0,
                y - 4.0
            ));
        }
    }
    // Dock / undock markers on both paths.
    for (stamp, label) in [(log.dock_time, "dock"), (log.undock_time, "undock")] {
        let Some(ts) = stamp else { continue };
        let Some(row) = log.rows.iter().find(|r| r.t >= ts - 1e-9) else { continue };
        for (state, color) in [(&row.state.r1, COLOR_R1), (&row.state.r2, COLOR_R2)] {
            let (x, y) = xy.map((state.px, state.py), xr, yr);
            svg.push_str(&format!(
                "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"6\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n"
            ));
        }
        let (x, y) = xy.map((row.state.r1.px, row.state.r1.py), xr, yr);
        svg.push_str(&text(x + 9.0, y - 9.0, 12, "#333333", &format!("{label} t={ts}s")));
    }
    svg.push_str(&text(xy.x, xy.y - 10.0, 14, "#333333", "positions [m]"));
    svg.push_str(&text(xy.x + xy.w - 150.0, xy.y + 16.0, 12, COLOR_R1, "robot 1"));
    svg.push_str(&text(xy.x + xy.w - 75.0, xy.y + 16.0, 12, COLOR_R2, "robot 2"));

    // --- Residual panels ----------------------------------------------------
    let t_end = log.rows.last().map(|r| r.t).unwrap_or(1.0).max(1e-9);
    let series: Vec<Vec<(f64, f64)>> = [
        |r: &LogRow| r.residuals.axis,
        |r: &LogRow| r.residuals.align,
        |r: &LogRow| r.residuals.dist,
        |r: &LogRow| r.residuals.soft,
    ]
    .iter()
    .map(|f| log.rows.iter().map(|r| (r.t, f(r))).collect())
    .collect();

    for (panel, idx, title) in [
        (&angle_panel, [0usize, 1], "angular residuals [rad]"),
        (&dist_panel, [2usize, 3], "distance / relative-speed residuals"),
    ] {
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for &i in &idx {
            for &(_, v) in &series[i] {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !(lo.is_finite() && hi.is_finite()) {
            lo = -1.0;
            hi = 1.0;
        }
        if hi - lo < 1e-9 {
            hi += 1.0;
            lo -= 1.0;
        }
        let yr = (lo, hi);
        let xr = (0.0, t_end);
        svg.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#cccccc\"/>\n",
            panel.x, panel.y, panel.w, panel.h
        ));
        // Zero line.
        if lo < 0.0 && hi > 0.0 {
            let (x0, y0) = panel.map((0.0, 0.0), xr, yr);
            let (x1, _) = panel.map((t_end, 0.0), xr, yr);
            svg.push_str(&format!(
                "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y0:.1}\" stroke=\"#eeeeee\"/>\n"
            ));
        }
        for (k, &i) in idx.iter().enumerate() {
            let (name, color) = RESIDUAL_SERIES[i];
            let pts: Vec<(f64, f64)> = series[i].iter().map(|&v| panel.map(v, xr, yr)).collect();
            svg.push_str(&polyline(&pts, color, 1.4));
            svg.push_str(&text(
                panel.x + panel.w - 140.0 + 75.0 * k as f64,
                panel.y + 14.0,
                12,
                color,
                name,
            ));
        }
        // Dock / undock time markers.
        for stamp in [log.dock_time, log.undock_time].into_iter().flatten() {
            let (x, _) = panel.map((stamp, 0.0), xr, yr);
            svg.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n",
                panel.y,
                panel.y + panel.h
            ));
        }
        svg.push_str(&text(panel.x, panel.y - 10.0, 14, "#333333", title));
        svg.push_str(&text(
            panel.x + panel.w - 50.0,
            panel.y + panel.h + 16.0,
            12,
            "#333333",
            "t [s]",
        ));
        svg.push_str(&text(
            panel.x - 52.0,
            panel.y + 12.0,
            11,
            "#666666",
            &format!("{hi:+.2}"),
        ));
        svg.push_str(&text(
            panel.x - 52.0,
            panel.y + panel.h,
            11,
            "#666666",
            &format!("{lo:+.2}"),
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

/// Writes the SVG figure for a run.
pub fn write_plot_svg(path: impl AsRef<Path>, log: &TrajectoryLog) -> Result<(), ExportError> {
    let path = path.as_ref();
    std::fs::write(path, render_svg(log)).map_err(io_err(path))
}
