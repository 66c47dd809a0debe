//! Plain-text design report. Fixed-precision formatting keeps regeneration
//! byte-identical.

use std::fmt::Write;

use impa_core::ac::{BandReport, Calibration};
use impa_core::snail::TunableRange;
use impa_core::synthesis::{band_edges_from_w, DesignSpec, PortCoupling, Synthesis};
use impa_core::Element;

pub struct DesignReport<'a> {
    pub spec: &'a DesignSpec,
    pub synthesis: &'a Synthesis,
    pub calibration: &'a Calibration,
    pub threshold_db: f64,
    pub band: Option<&'a BandReport>,
    pub tuning: &'a TunableRange,
}

pub fn ghz(f: f64) -> String {
    format!("{:.6} GHz", f / 1e9)
}

pub fn pf(c: f64) -> String {
    format!("{:.4} pF", c * 1e12)
}

pub fn ph(l: f64) -> String {
    format!("{:.3} pH", l * 1e12)
}

pub fn ohm(r: f64) -> String {
    format!("{r:.3} ohm")
}

pub fn ms(j: f64) -> String {
    format!("{:.3} mS", j * 1e3)
}

pub fn db(x: f64) -> String {
    format!("{x:.3} dB")
}

fn line(out: &mut String, label: &str, value: String) {
    writeln!(out, "  {label:<30}{value}").unwrap();
}

pub fn element_line(e: &Element) -> String {
    match *e {
        Element::PortTermination { z0 } => format!("port termination       z0 = {}", ohm(z0)),
        Element::SeriesCapacitor { c } => format!("series capacitor       c = {}", pf(c)),
        Element::ShuntParallelLc { l, c } => format!("shunt parallel LC      l = {}, c = {}", ph(l), pf(c)),
        Element::ShuntResistor { r } => format!("shunt resistor         r = {}", ohm(r)),
    }
}

impl DesignReport<'_> {
    pub fn render(&self) -> String {
        let s = self.spec;
        let syn = self.synthesis;
        let cal = self.calibration;
        let (f1, f2) = band_edges_from_w(s.f0, s.w);
        let mut out = String::new();
        writeln!(out, "IMPA design report").unwrap();

        writeln!(out, "\nSpecification").unwrap();
        line(&mut out, "center frequency f0", ghz(s.f0));
        line(&mut out, "band edges f1, f2", format!("{}, {}", ghz(f1), ghz(f2)));
        line(
            &mut out,
            "fractional bandwidth w",
            format!("{:.4} % ({})", s.w * 100.0, ghz(s.w * s.f0)),
        );
        let g: Vec<String> = s
            .prototype
            .coefficients()
            .iter()
            .map(|g| format!("{g}"))
            .collect();
        line(
            &mut out,
            "prototype",
            format!(
                "N = {}, {} min gain, {} ripple, g = {}",
                s.prototype.order(),
                db(s.prototype.g_min_db()),
                db(s.prototype.ripple_db()),
                g.join(", ")
            ),
        );
        line(&mut out, "port impedance", ohm(s.z_port));
        line(
            &mut out,
            "SNAIL",
            format!(
                "L_J = {}, alpha = {}, n = {}",
                ph(s.snail.l_j()),
                s.snail.alpha(),
                s.snail.n_large()
            ),
        );
        line(&mut out, "JPA shunt capacitance C1", pf(s.c1_shunt));
        line(&mut out, "resonator 2 impedance Z2", ohm(s.z2));

        writeln!(out, "\nOperating point").unwrap();
        let origin = if s.bias.is_some() {
            "from spec"
        } else {
            "tuned to f0"
        };
        line(
            &mut out,
            "flux bias",
            format!("{:.6} Phi0 ({origin})", syn.bias.phi_over_phi0()),
        );
        line(&mut out, "SNAIL inductance L_S", ph(syn.l_s));

        writeln!(out, "\nMatching network").unwrap();
        line(&mut out, "resonator 1 impedance Z1", ohm(syn.z1));
        line(&mut out, "resonator 1 net shunt C", pf(syn.c1_absorbed));
        line(&mut out, "resonator 2 inductance L2", ph(syn.l2));
        line(&mut out, "resonator 2 capacitance C2", pf(syn.c2));
        line(&mut out, "resonator 2 net shunt C", pf(syn.c2_absorbed));
        line(&mut out, "inverter J12", ms(syn.j12));
        line(&mut out, "coupling capacitor C12", pf(syn.c12));
        match syn.port {
            PortCoupling::Tap { j, q_ext } => line(
                &mut out,
                "port coupling",
                format!("direct tap, J = {}, Q_ext = {q_ext:.3}", ms(j)),
            ),
            PortCoupling::Capacitor { j, c, absorbed } => line(
                &mut out,
                "port coupling",
                format!(
                    "capacitor C01 = {}, J = {}, absorbed {}",
                    pf(c),
                    ms(j),
                    pf(absorbed)
                ),
            ),
        }
        line(&mut out, "prototype resistance R", ohm(syn.r_prototype));

        writeln!(out, "\nCalibration").unwrap();
        line(&mut out, "calibrated R", ohm(cal.r));
        line(
            &mut out,
            "achieved min gain in band",
            db(cal.achieved_min_gain_db),
        );
        line(&mut out, "oscillation threshold R", ohm(cal.threshold_r));
        line(&mut out, "largest reachable min gain", db(cal.max_min_gain_db));

        writeln!(out, "\nGain band (>= {})", db(self.threshold_db)).unwrap();
        match self.band {
            Some(b) => {
                line(&mut out, "f_low", ghz(b.f_low));
                line(&mut out, "f_high", ghz(b.f_high));
                line(&mut out, "bandwidth", ghz(b.bandwidth));
                line(&mut out, "min gain", db(b.min_gain_db));
                line(&mut out, "max gain", db(b.max_gain_db));
                line(&mut out, "ripple", db(b.ripple_db));
            }
            None => writeln!(out, "  no frequency reaches the threshold").unwrap(),
        }

        writeln!(out, "\nTunable range (bare JPA resonance)").unwrap();
        line(&mut out, "f_min", ghz(self.tuning.f_min));
        line(&mut out, "f_max", ghz(self.tuning.f_max));

        writeln!(out, "\nCalibrated netlist").unwrap();
        for (i, e) in cal.netlist.elements().iter().enumerate() {
            writeln!(out, "  {i}  {}", element_line(e)).unwrap();
        }

        writeln!(out, "\nWarnings").unwrap();
        if syn.warnings.is_empty() {
            writeln!(out, "  none").unwrap();
        }
        for w in &syn.warnings {
            writeln!(out, "  - {w}").unwrap();
        }
        out
    }
}

pub fn render_band(b: &BandReport, threshold_db: f64) -> String {
    let mut out = String::new();
    writeln!(out, "Gain band (>= {})", db(threshold_db)).unwrap();
    line(&mut out, "f_low", ghz(b.f_low));
    line(&mut out, "f_high", ghz(b.f_high));
    line(&mut out, "bandwidth", ghz(b.bandwidth));
    line(&mut out, "min gain", db(b.min_gain_db));
    line(&mut out, "max gain", db(b.max_gain_db));
    line(&mut out, "ripple", db(b.ripple_db));
    out
}
