use rmtlab::coulomb_scaling::*;
use rmtlab::numerics::*;

fn main() {
    let p = gamma_profile(1.0, &default_y_grid()).unwrap();
    // inner integral of gamma
    let inner = {
        let mut acc = 0.0;
        for i in 1..p.y_grid.len() {
            acc += 0.5 * (p.gamma[i] + p.gamma[i-1]) * (p.y_grid[i] - p.y_grid[i-1]);
        }
        acc
    };
    let c = asymptotic_matching(&p).unwrap();
    println!("inner ∫Γ = {inner:.6}, tail c = {c:.4}, tails = {:.6}, total = {:.6}",
        2.0*c/40.0, inner + 2.0*c/40.0);
    let p = density_perturbation(&p).unwrap();
    for &u in &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 39.0] {
        let idx = p.f_grid.iter().enumerate().min_by(|a, b| (a.1 - u).abs().partial_cmp(&(b.1 - u).abs()).unwrap()).unwrap().0;
        println!("u={:>6.2}  F={:+.6e}  uF={:+.4e}  u^3 F={:+.4e}", p.f_grid[idx], p.f[idx], p.f_grid[idx]*p.f[idx], p.f_grid[idx].powi(3)*p.f[idx]);
    }
    // cumulative ∫ u F over growing windows
    for &cap in &[5.0, 10.0, 20.0, 40.0] {
        let mut acc = 0.0;
        for i in 1..p.f_grid.len() {
            if p.f_grid[i].abs() <= cap {
                acc += 0.5 * (p.f_grid[i]*p.f[i] + p.f_grid[i-1]*p.f[i-1]) * (p.f_grid[i] - p.f_grid[i-1]);
            }
        }
        println!("∫uF over [−{cap},{cap}] = {acc:.4}");
    }
}
