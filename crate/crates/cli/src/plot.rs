//! Matplotlib scripts that read the CSVs written next to them.

use std::fmt::Write as _;

const PRELUDE: &str = "\
import os
import numpy as np
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(HERE, name)) as f:
        lines = [line for line in f if not line.startswith(\"#\")]
    return np.genfromtxt(lines, delimiter=\",\", names=True)

";

fn py_list(names: &[String]) -> String {
    let quoted: Vec<String> = names.iter().map(|n| format!("{n:?}")).collect();
    format!("[{}]", quoted.join(", "))
}

/// One subplot per (α, r) panel, one curve per file in the panel.
pub fn evolve_script(panels: &[(String, Vec<String>)]) -> String {
    let mut s = String::from(PRELUDE);
    s.push_str("PANELS = [\n");
    for (title, files) in panels {
        let _ = writeln!(s, "    ({title:?}, {}),", py_list(files));
    }
    s.push_str(
        "]

fig, axes = plt.subplots(1, len(PANELS), figsize=(4 * len(PANELS), 3.5), squeeze=False)
for ax, (title, files) in zip(axes[0], PANELS):
    for name in files:
        d = load(name)
        label = name.rsplit(\"_nbar\", 1)[-1].removesuffix(\".csv\")
        ax.plot(d[\"t\"], d[\"coherence_bits\"], label=f\"nbar={label}\")
    ax.set_title(title)
    ax.set_xlabel(\"t\")
    ax.set_ylabel(\"coherence (bits)\")
    ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, \"coherence.png\"), dpi=150)
",
    );
    s
}

/// One filled contour per steady surface.
pub fn steady_script(files: &[String], alpha_points: usize, r_points: usize) -> String {
    let mut s = String::from(PRELUDE);
    let _ = writeln!(s, "FILES = {}\nSHAPE = ({alpha_points}, {r_points})\n", py_list(files));
    s.push_str(
        "fig, axes = plt.subplots(1, len(FILES), figsize=(4 * len(FILES), 3.5), squeeze=False)
for ax, name in zip(axes[0], FILES):
    d = load(name)
    a = d[\"alpha\"].reshape(SHAPE)
    r = d[\"r\"].reshape(SHAPE)
    c = d[\"coherence_bits\"].reshape(SHAPE)
    cs = ax.contourf(a, r, c, levels=20)
    fig.colorbar(cs, ax=ax)
    ax.set_title(name.removesuffix(\".csv\"))
    ax.set_xlabel(\"alpha\")
    ax.set_ylabel(\"r\")
fig.tight_layout()
fig.savefig(os.path.join(HERE, \"steady.png\"), dpi=150)
",
    );
    s
}
