use dockmpc::gradient_check::{run_gradient_check, CheckSettings};
fn main() {
    let o = run_gradient_check(&CheckSettings::default());
    println!("instances {} max_rel {:.3e} worst {} elapsed {:?} pass {}",
        o.instances, o.max_rel_error, o.worst_instance, o.elapsed, o.pass);
}
