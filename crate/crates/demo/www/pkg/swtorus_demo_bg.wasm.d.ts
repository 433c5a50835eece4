/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_convergencecurve_free: (a: number, b: number) => void;
export const __wbg_momentprobe_free: (a: number, b: number) => void;
export const __wbg_reducedflow_free: (a: number, b: number) => void;
export const convergencecurve_errors: (a: number) => [number, number];
export const convergencecurve_h: (a: number) => [number, number];
export const convergencecurve_new: (a: number, b: number, c: number) => [number, number, number];
export const convergencecurve_nominal_order: (a: number) => number;
export const convergencecurve_order: (a: number) => number;
export const momentprobe_defect: (a: number) => number;
export const momentprobe_mu: (a: number) => [number, number];
export const momentprobe_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const momentprobe_oracle: (a: number) => [number, number];
export const momentprobe_pairing: (a: number) => number;
export const momentprobe_symplectic: (a: number) => number;
export const reducedflow_curvature_density: (a: number) => [number, number];
export const reducedflow_energies: (a: number) => [number, number];
export const reducedflow_energy: (a: number) => number;
export const reducedflow_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const reducedflow_residual: (a: number) => number;
export const reducedflow_size: (a: number) => number;
export const reducedflow_spinor_density: (a: number) => [number, number];
export const reducedflow_step: (a: number, b: number) => [number, number, number];
export const reducedflow_steps: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
