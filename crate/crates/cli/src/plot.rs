//! SVG panel: probe amplitudes over dashed control profiles, and the two coherences.

use std::path::Path;

use plotters::prelude::*;

use crate::csv::Row;
use crate::output::write_atomic;
use crate::CliError;

const WIDTH: u32 = 900;
const HEIGHT: u32 = 760;

fn plot_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("plot: {e}"))
}

fn max_of(rows: &[Row], col: usize) -> f64 {
    rows.iter().map(|r| r[col]).fold(0.0, f64::max)
}

/// Renders one panel to an SVG string.
pub fn render_svg(rows: &[Row], title: &str) -> Result<String, CliError> {
    if rows.len() < 2 {
        return Err(CliError::Validation("plot: need at least two samples".into()));
    }
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (WIDTH, HEIGHT)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let root = root.titled(title, ("sans-serif", 22)).map_err(plot_err)?;
        let (upper, lower) = root.split_vertically(HEIGHT / 2 - 10);
        let t0 = rows[0][0];
        let t1 = rows[rows.len() - 1][0];

        let e_max = max_of(rows, 1).max(max_of(rows, 2));
        let e_top = if e_max > 0.0 { 1.1 * e_max } else { 1.0 };
        let mut chart = ChartBuilder::on(&upper)
            .margin(12)
            .x_label_area_size(34)
            .y_label_area_size(70)
            .build_cartesian_2d(t0..t1, 0.0..e_top)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc("tau (us)")
            .y_desc("|E| (V/m)")
            .y_label_formatter(&|v| format!("{v:.2e}"))
            .draw()
            .map_err(plot_err)?;
        let colors = [RGBColor(120, 120, 120), RGBColor(200, 120, 0), RGBColor(0, 150, 150), RGBColor(150, 0, 150)];
        let names = ["Omega", "Omega1", "Omega2", "Omega3"];
        for k in 0..4 {
            let col = 5 + k;
            if max_of(rows, col) == 0.0 {
                continue;
            }
            let style = ShapeStyle::from(&colors[k]).stroke_width(1);
            chart
                .draw_series(DashedLineSeries::new(rows.iter().map(|r| (r[0], r[col] * e_top * 0.95)), 6, 4, style))
                .map_err(plot_err)?
                .label(format!("{} (scaled)", names[k]))
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], colors[k]));
        }
        for (col, color, name) in [(1, BLUE, "|E_a|"), (2, RED, "|E_b|")] {
            chart
                .draw_series(LineSeries::new(rows.iter().map(|r| (r[0], r[col])), color.stroke_width(2)))
                .map_err(plot_err)?
                .label(name)
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;

        let r_max = max_of(rows, 3).max(max_of(rows, 4));
        let r_top = if r_max > 0.0 { 1.1 * r_max } else { 1.0 };
        let mut chart = ChartBuilder::on(&lower)
            .margin(12)
            .x_label_area_size(34)
            .y_label_area_size(70)
            .build_cartesian_2d(t0..t1, 0.0..r_top)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc("tau (us)")
            .y_desc("|rho| at z = L")
            .y_label_formatter(&|v| format!("{v:.2e}"))
            .draw()
            .map_err(plot_err)?;
        for (col, color, name) in [(3, GREEN, "|rho_cb|"), (4, MAGENTA, "|rho_ce|")] {
            chart
                .draw_series(LineSeries::new(rows.iter().map(|r| (r[0], r[col])), color.stroke_width(2)))
                .map_err(plot_err)?
                .label(name)
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}

pub fn write_panel(rows: &[Row], title: &str, path: &Path) -> Result<(), CliError> {
    let svg = render_svg(rows, title)?;
    write_atomic(path, svg.as_bytes())
}
