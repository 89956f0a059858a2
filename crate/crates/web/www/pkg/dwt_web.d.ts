/* tslint:disable */
/* eslint-disable */

/**
 * `ln(λ-1)`, `μ[0]`, `μ[1]` over evenly spaced β, with fitted rates.
 */
export function betaSweep(potential: string, beta_lo: number, beta_hi: number, n: number): string;

/**
 * Rule report and stage-by-stage masses for a schedule; an empty string
 * runs the bundled schedule.
 */
export function nonselection(schedule: string): string;

/**
 * Regime and limit weights on an `s × t` grid of a two-parameter family.
 */
export function phaseGrid(family: string, s_lo: number, s_hi: number, s_n: number, t_lo: number, t_hi: number, t_n: number): string;

/**
 * Preset inputs for the page.
 */
export function presets(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly betaSweep: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly nonselection: (a: number, b: number) => [number, number, number, number];
    readonly phaseGrid: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly presets: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
