/* tslint:disable */
/* eslint-disable */

/**
 * Errors of one operator on the unit torus `N⁴` for `N = 4, 8, …`.
 */
export class ConvergenceCurve {
    free(): void;
    [Symbol.dispose](): void;
    errors(): Float64Array;
    h(): Float64Array;
    /**
     * `operator` is one of `dirac_link`, `dirac_central`, `plaquette`,
     * `fhat`; sizes double from 4 up to `max_n`.
     */
    constructor(operator: string, max_n: number);
    nominal_order(): number;
    /**
     * Fitted slope of `log e` against `log h`.
     */
    order(): number;
}

/**
 * μ at a point of ℍ and the Hamiltonian identity along a direction.
 */
export class MomentProbe {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `ω(L_ζ h, v) + c·Re(h̄v)`, zero up to rounding.
     */
    defect(): number;
    /**
     * Closed-form `μ(h)`.
     */
    mu(): Float64Array;
    /**
     * `h`, `v` as `[w, x, y, z]`; `c` is the Lie algebra element `ic`.
     */
    constructor(h: Float64Array, v: Float64Array, c: number);
    /**
     * `½h̄ih` by quaternion products.
     */
    oracle(): Float64Array;
    /**
     * `c·Re(h̄v)`.
     */
    pairing(): number;
    /**
     * `ω(L_ζ h, v)`.
     */
    symplectic(): number;
}

/**
 * Gradient flow of the reduced equations on an `n×n` torus of side 2π,
 * lifted over a 4×4 transverse torus.
 */
export class ReducedFlow {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Pointwise size of the curvature residual `|K − μ∘u|`.
     */
    curvature_density(): Float64Array;
    /**
     * Energy after construction and after every call to `step`.
     */
    energies(): Float64Array;
    energy(): number;
    constructor(n: number, seed: number, amplitude: number, holonomy0: number, holonomy1: number);
    /**
     * Sup norm of the reduced residual.
     */
    residual(): number;
    size(): number;
    /**
     * `|u|²` per site, row-major in `(x0, x1)`.
     */
    spinor_density(): Float64Array;
    /**
     * Runs up to `count` descent steps and returns the energy afterwards.
     */
    step(count: number): number;
    steps(): number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_convergencecurve_free: (a: number, b: number) => void;
    readonly __wbg_momentprobe_free: (a: number, b: number) => void;
    readonly __wbg_reducedflow_free: (a: number, b: number) => void;
    readonly convergencecurve_errors: (a: number) => [number, number];
    readonly convergencecurve_h: (a: number) => [number, number];
    readonly convergencecurve_new: (a: number, b: number, c: number) => [number, number, number];
    readonly convergencecurve_nominal_order: (a: number) => number;
    readonly convergencecurve_order: (a: number) => number;
    readonly momentprobe_defect: (a: number) => number;
    readonly momentprobe_mu: (a: number) => [number, number];
    readonly momentprobe_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly momentprobe_oracle: (a: number) => [number, number];
    readonly momentprobe_pairing: (a: number) => number;
    readonly momentprobe_symplectic: (a: number) => number;
    readonly reducedflow_curvature_density: (a: number) => [number, number];
    readonly reducedflow_energies: (a: number) => [number, number];
    readonly reducedflow_energy: (a: number) => number;
    readonly reducedflow_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly reducedflow_residual: (a: number) => number;
    readonly reducedflow_size: (a: number) => number;
    readonly reducedflow_spinor_density: (a: number) => [number, number];
    readonly reducedflow_step: (a: number, b: number) => [number, number, number];
    readonly reducedflow_steps: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
