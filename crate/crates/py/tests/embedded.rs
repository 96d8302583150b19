use gcs::gcs as gcs_module;
use pyo3::prelude::*;

#[test]
fn module_works_in_embedded_interpreter() {
    pyo3::append_to_inittab!(gcs_module);
    Python::initialize();
    Python::attach(|py| {
        let code = c"
import gcs
p = gcs.pair(10)
assert len(p) == 2 and p.length == 10 and p.verify()
s = gcs.build(87)
assert gcs.GcsSet.parse(s.to_text()).verify()
assert gcs.is_hadamard(gcs.hadamard(1))
try:
    gcs.pair(7)
    raise AssertionError('7 accepted')
except ValueError:
    pass
";
        py.run(code, None, None).unwrap();
    });
}

