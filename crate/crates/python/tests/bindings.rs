use dlw_py::dlw_py;
use pyo3::prelude::*;
use pyo3::types::PyDict;

#[test]
fn module_entry_points() {
    pyo3::append_to_inittab!(dlw_py);
    Python::initialize();
    Python::attach(|py| {
        let m = py.import("dlw_py").unwrap();
        let locals = PyDict::new(py);
        locals.set_item("dlw", m).unwrap();
        let code = c"
import json
assert dlw.smith([[2, 0], [0, 3]]) == [1, 6]
assert dlw.cohomology([[-2, 2]], [], 1) == (0, [2])
assert dlw.cohomology([[0]], [[0]], 1) == (1, [])
doc = dlw.Document.synth('pipeline', 0)
code, out = doc.run('propagate')
assert code == 0 and json.loads(out)['verified']
assert dlw.Document.from_json(doc.to_json()) == doc
assert dlw.run('coherence', '{}')[0] == 2
";
        py.run(code, None, Some(&locals)).unwrap();
    });
}
