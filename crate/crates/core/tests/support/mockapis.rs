//! Five fixture APIs and a mock backend that answers their seed prompts.

use evofuzz_core::corpus::{ApiTarget, Library};
use evofuzz_core::genbackend::{CompletionRequest, MockBackend, SamplingParams};
use evofuzz_core::seedgen::build_prompt;

pub struct FixtureApi {
    pub name: &'static str,
    pub library: Library,
    pub signature: &'static str,
    /// Raw completions of the seed prompt.
    pub completions: &'static [&'static str],
}

pub const APIS: &[FixtureApi] = &[
    FixtureApi {
        name: "torch.abs",
        library: Library::TorchLike,
        signature: "torch.abs(input, *, out=None)",
        completions: &[
            "x = torch.randn(4)\ny = torch.abs(x)\nprint(y)\n",
            "x = torch.tensor([-1.5, 0.0, 2.0])\nout = torch.empty(3)\ntorch.abs(x, out=out)\nz = out + 1\n",
            "x = torch.randn(2, 2)\ny = torch.abs(x)\nz = torch.",
            "data = torch.arange(-3, 3)\nfor i in range(2):\n    r = torch.abs(data * i)\n",
        ],
    },
    FixtureApi {
        name: "torch.matmul",
        library: Library::TorchLike,
        signature: "torch.matmul(input, other, *, out=None)",
        completions: &[
            "a = torch.randn(2, 3)\nb = torch.randn(3, 4)\nc = torch.matmul(a, b)\nprint(c.shape)\n",
            "a = torch.randn(5)\nb = torch.randn(5)\nd = torch.matmul(a, b)\ne = torch.exp(d)\n",
            "x = torch.rand(2, 2)\ny = torch.matmul(x, x.t())\nif y.sum() > 0:\n    z = torch.inverse(y\n",
        ],
    },
    FixtureApi {
        name: "torch.nn.functional.relu",
        library: Library::TorchLike,
        signature: "torch.nn.functional.relu(input, inplace=False)",
        completions: &[
            "import torch.nn.functional as F\nx = torch.randn(3, 3)\ny = F.relu(x)\n",
            "x = torch.linspace(-1, 1, 5)\ny = torch.nn.functional.relu(x, inplace=False)\nz = torch.sum(y)\n",
            "This program creates a tensor and applies relu.\n",
        ],
    },
    FixtureApi {
        name: "tf.math.log",
        library: Library::TensorflowLike,
        signature: "tf.math.log(x, name=None)",
        completions: &[
            "x = tf.constant([1.0, 2.0, 3.0])\ny = tf.math.log(x)\nprint(y.numpy())\n",
            "x = tf.random.uniform([2, 2], minval=0.1, maxval=1.0)\ny = tf.math.log(x)\nz = tf.reduce_mean(y)\n",
            "x = tf.constant([0.5])\ny = tf.math.log(x, name='log')\n```\n",
        ],
    },
    FixtureApi {
        name: "tf.nn.conv2d",
        library: Library::TensorflowLike,
        signature: "tf.nn.conv2d(input, filters, strides, padding, data_format='NHWC', dilations=None, name=None)",
        completions: &[
            "x = tf.random.normal([1, 5, 5, 1])\nw = tf.random.normal([3, 3, 1, 2])\ny = tf.nn.conv2d(x, w, strides=1, padding='SAME')\n",
            "inp = tf.ones([1, 4, 4, 2])\nfilt = tf.ones([2, 2, 2, 1])\nout = tf.nn.conv2d(inp, filt, strides=[1, 2, 2, 1], padding='VALID')\nr = tf.nn.relu(out)\n",
        ],
    },
];

/// Fills used for every infill request without a recorded answer.
pub const FILLS: &[&str] = &["x", "2", "x + 1", "None", "1, 2", "-1", "0.5", "y = x * 2", "keepdims", "(x)"];

pub fn target(api: &FixtureApi) -> ApiTarget {
    ApiTarget::new(api.library, api.name, api.signature).expect("fixture APIs are valid")
}

pub fn targets() -> Vec<ApiTarget> {
    APIS.iter().map(target).collect()
}

pub fn backend() -> MockBackend {
    let mut b = MockBackend::new().with_default_fills(FILLS.iter().map(|s| (*s).to_owned()).collect());
    for api in APIS {
        let req = CompletionRequest { prompt: build_prompt(&target(api)), params: SamplingParams::seed_default() };
        b = b.with_completion(&req, api.completions.iter().map(|s| (*s).to_owned()).collect());
    }
    b
}

/// Catalog lines for the fixture APIs.
pub fn catalog_jsonl() -> String {
    APIS.iter()
        .map(|a| {
            serde_json::json!({"name": a.name, "signature": a.signature, "library": a.library}).to_string() + "\n"
        })
        .collect()
}
