use hflm::kernel::{FddSpec, ProcessParams};
use hflm::stable_limit::scale_integral;
use hflm::QuadSpec;

fn main() {
    let q = QuadSpec::default();
    let params = ProcessParams::new(1.2, 0.7, 1.0, 0.0).unwrap();
    for fdd in [
        FddSpec::single(1.0, 1.0, 0.0),
        FddSpec::single(2.0, 1.0, 0.0),
        FddSpec::new(vec![1.0, 2.0], vec![1.0, -0.4], vec![0.3, 0.6]).unwrap(),
    ] {
        match scale_integral(&params, &fdd, &q) {
            Ok(v) => println!("ok  S = {v}"),
            Err(e) => println!("ERR {e}"),
        }
    }
}
