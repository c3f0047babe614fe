//! Step log CSV and VTU field files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use cutfsi::analysis::{energy, format_sci, EnergySnapshot, GhostMatrices};
use cutfsi::assembly::Discretization;
use cutfsi::fem::{FieldRole, FieldView};
use cutfsi::geometry::Side;
use cutfsi::timestepper::{State, StepObserver, StepReport};
use cutfsi::SimulationConfig;

/// Choices that shape every output but are not config keys.
const DECISIONS: [&str; 5] = [
    "final time T defaults to 8 because the source study does not state it",
    "errors compare point values of both runs at the coarse cut-quadrature points",
    "v_s(T) and grad u(T) errors integrate over the physical solid; E_T uses the computational solid domain",
    "space-time pressure error is scaled by the coarse mesh width",
    "u^n = u^(n-1) + k v_s^n is imposed on the displacement coefficients",
];

/// The resolved config and the fixed decisions as lines of text.
pub fn metadata(config: &SimulationConfig) -> String {
    let mut s = format!("cutfsi {}\n", env!("CARGO_PKG_VERSION"));
    s.push_str(&config.to_text());
    for d in DECISIONS {
        let _ = writeln!(s, "decision: {d}");
    }
    s
}

/// `metadata` with every line prefixed by `# `.
pub fn comment_header(config: &SimulationConfig) -> String {
    metadata(config).lines().map(|l| format!("# {l}\n")).collect()
}

/// Rows `n, t, residual, constraint_residual` followed by the energy
/// components, one per observed state.
pub struct StepLog {
    ghosts: GhostMatrices,
    csv: String,
}

impl StepLog {
    pub fn new(disc: &Discretization) -> Result<Self> {
        let mut csv = comment_header(disc.config());
        csv.push_str("n,t,residual,constraint_residual");
        for l in EnergySnapshot::LABELS {
            csv.push(',');
            csv.push_str(l);
        }
        csv.push('\n');
        Ok(Self {
            ghosts: GhostMatrices::assemble(disc)?,
            csv,
        })
    }

    pub fn push(&mut self, disc: &Discretization, state: &State, report: Option<&StepReport>) {
        let (res, con) = report.map_or((0.0, 0.0), |r| (r.residual, r.constraint_residual));
        let mut cells = vec![state.step.to_string(), format_sci(state.t), format_sci(res), format_sci(con)];
        cells.extend(energy(disc, &self.ghosts, &state.coeffs).components().iter().map(|&v| format_sci(v)));
        self.csv.push_str(&cells.join(","));
        self.csv.push('\n');
    }

    pub fn into_csv(self) -> String {
        self.csv
    }
}

/// Observer that logs every step and dumps VTU files every `dump_every`
/// steps into `dir`.
pub struct RunWriter<'a> {
    pub log: StepLog,
    pub dir: &'a Path,
    pub dump_every: Option<usize>,
    pub dumps: Vec<String>,
}

impl StepObserver for RunWriter<'_> {
    fn observe(&mut self, disc: &Discretization, state: &State, report: Option<&StepReport>) -> cutfsi::Result<()> {
        self.log.push(disc, state, report);
        if let Some(every) = self.dump_every.filter(|&e| e > 0) {
            if state.step.is_multiple_of(every) {
                for side in Side::BOTH {
                    let name = format!("{}_{:04}.vtu", side.label(), state.step);
                    std::fs::write(self.dir.join(&name), vtu(disc, state, side))?;
                    self.dumps.push(name);
                }
            }
        }
        Ok(())
    }
}

fn data_array(out: &mut String, name: &str, kind: &str, components: usize, values: impl Iterator<Item = String>) {
    let _ = write!(out, "        <DataArray type=\"{kind}\" Name=\"{name}\"");
    if components > 1 {
        let _ = write!(out, " NumberOfComponents=\"{components}\"");
    }
    out.push_str(" format=\"ascii\">\n         ");
    for v in values {
        out.push(' ');
        out.push_str(&v);
    }
    out.push_str("\n        </DataArray>\n");
}

/// XML unstructured grid of the active cells of `side` with the side's fields
/// at the cell corners, the cell class and the cut fraction.
pub fn vtu(disc: &Discretization, state: &State, side: Side) -> String {
    let mesh = disc.mesh();
    let topo = disc.topology();
    let cells: Vec<usize> = topo.active_cells(side).collect();
    let n = mesh.n();
    let mut vertex_index: HashMap<usize, usize> = HashMap::new();
    let mut points: Vec<([f64; 2], usize)> = Vec::new();
    let mut connectivity = Vec::with_capacity(4 * cells.len());
    for &c in &cells {
        let (i, j) = mesh.cell_ij(c);
        for v in [j * (n + 1) + i, j * (n + 1) + i + 1, (j + 1) * (n + 1) + i + 1, (j + 1) * (n + 1) + i] {
            let idx = *vertex_index.entry(v).or_insert_with(|| {
                points.push((mesh.vertex(v), c));
                points.len() - 1
            });
            connectivity.push(idx);
        }
    }
    let roles: &[FieldRole] = match side {
        Side::Fluid => &[FieldRole::FluidVelocity, FieldRole::Pressure],
        Side::Solid => &[FieldRole::SolidVelocity, FieldRole::Displacement],
    };
    let layout = disc.layout();

    let mut out = String::from("<?xml version=\"1.0\"?>\n<!--\n");
    out.push_str(&metadata(disc.config()));
    let _ = writeln!(out, "side: {}\nstep: {}\nt: {}\n-->", side.label(), state.step, state.t);
    out.push_str("<VTKFile type=\"UnstructuredGrid\" version=\"1.0\" byte_order=\"LittleEndian\">\n");
    out.push_str("  <UnstructuredGrid>\n");
    let _ = writeln!(
        out,
        "    <Piece NumberOfPoints=\"{}\" NumberOfCells=\"{}\">",
        points.len(),
        cells.len()
    );
    out.push_str("      <PointData>\n");
    for &role in roles {
        let view = FieldView::new(disc.dofmap(role), layout.slice(role, &state.coeffs), role.components());
        let evals: Vec<_> = points.iter().map(|&(x, c)| view.eval(c, x)).collect();
        if role.components() == 2 {
            let values = evals
                .iter()
                .flat_map(|e| [format_sci(e.value[0]), format_sci(e.value[1]), format_sci(0.0)]);
            data_array(&mut out, role.label(), "Float64", 3, values);
        } else {
            data_array(&mut out, role.label(), "Float64", 1, evals.iter().map(|e| format_sci(e.value[0])));
        }
    }
    out.push_str("      </PointData>\n      <CellData>\n");
    data_array(&mut out, "class", "Int32", 1, cells.iter().map(|&c| topo.class(c).code().to_string()));
    data_array(&mut out, "kappa", "Float64", 1, cells.iter().map(|&c| format_sci(topo.cut_fraction(c, side))));
    out.push_str("      </CellData>\n      <Points>\n");
    data_array(
        &mut out,
        "Points",
        "Float64",
        3,
        points
            .iter()
            .flat_map(|(x, _)| [format_sci(x[0]), format_sci(x[1]), format_sci(0.0)]),
    );
    out.push_str("      </Points>\n      <Cells>\n");
    data_array(&mut out, "connectivity", "Int64", 1, connectivity.iter().map(|i| i.to_string()));
    data_array(&mut out, "offsets", "Int64", 1, (1..=cells.len()).map(|i| (4 * i).to_string()));
    // 9 is VTK_QUAD
    data_array(&mut out, "types", "UInt8", 1, cells.iter().map(|_| "9".to_string()));
    out.push_str("      </Cells>\n    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n");
    out
}
