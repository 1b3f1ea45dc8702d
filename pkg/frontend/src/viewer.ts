/** Minimal WebGL mesh viewer for the generated model.
 *
 * The mesh payload arrives fully triangulated with material tags; this
 * module only uploads buffers and draws them (flat shading from
 * per-face normals, colours from the shared material table).  Orbit by
 * dragging, zoom with the wheel.
 */

import { FALLBACK_COLOR, MATERIAL_COLORS } from "./types.js";
import type { ModelDoc } from "./types.js";

const VERT = `
attribute vec3 aPos;
attribute vec3 aNormal;
attribute vec3 aColor;
uniform mat4 uMvp;
varying vec3 vColor;
varying vec3 vNormal;
void main() {
  gl_Position = uMvp * vec4(aPos, 1.0);
  vColor = aColor;
  vNormal = aNormal;
}`;

const FRAG = `
precision mediump float;
varying vec3 vColor;
varying vec3 vNormal;
uniform vec3 uLight;
void main() {
  float lit = 0.45 + 0.55 * max(dot(normalize(vNormal), uLight), 0.0);
  gl_FragColor = vec4(vColor * lit, 1.0);
}`;

type Mat4 = Float32Array;

function mat4Mul(a: Mat4, b: Mat4): Mat4 {
  const out = new Float32Array(16);
  for (let c = 0; c < 4; c += 1) {
    for (let r = 0; r < 4; r += 1) {
      let s = 0;
      for (let k = 0; k < 4; k += 1) s += a[k * 4 + r] * b[c * 4 + k];
      out[c * 4 + r] = s;
    }
  }
  return out;
}

function perspective(fovY: number, aspect: number, near: number, far: number): Mat4 {
  const f = 1 / Math.tan(fovY / 2);
  const out = new Float32Array(16);
  out[0] = f / aspect;
  out[5] = f;
  out[10] = (far + near) / (near - far);
  out[11] = -1;
  out[14] = (2 * far * near) / (near - far);
  return out;
}

function lookAt(eye: number[], target: number[], up: number[]): Mat4 {
  const sub = (a: number[], b: number[]) => [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
  const cross = (a: number[], b: number[]) => [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
  const norm = (a: number[]) => {
    const l = Math.hypot(a[0], a[1], a[2]) || 1;
    return [a[0] / l, a[1] / l, a[2] / l];
  };
  const dot = (a: number[], b: number[]) => a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  const z = norm(sub(eye, target));
  const x = norm(cross(up, z));
  const y = cross(z, x);
  return new Float32Array([
    x[0], y[0], z[0], 0,
    x[1], y[1], z[1], 0,
    x[2], y[2], z[2], 0,
    -dot(x, eye), -dot(y, eye), -dot(z, eye), 1,
  ]);
}

export class MeshViewer {
  private gl: WebGLRenderingContext | null;
  private program: WebGLProgram | null = null;
  private buffer: WebGLBuffer | null = null;
  private nVerts = 0;
  private center = [0, 0, 0];
  private radius = 5;
  private yaw = Math.PI / 4;
  private pitch = Math.PI / 7;
  private zoom = 1;
  private dragFrom: { x: number; y: number; yaw: number; pitch: number } | null =
    null;

  constructor(private canvas: HTMLCanvasElement) {
    this.gl = canvas.getContext("webgl");
    if (this.gl) this.initGl(this.gl);
    canvas.addEventListener("pointerdown", (e) => {
      canvas.setPointerCapture(e.pointerId);
      this.dragFrom = { x: e.clientX, y: e.clientY, yaw: this.yaw, pitch: this.pitch };
    });
    canvas.addEventListener("pointermove", (e) => {
      if (!this.dragFrom) return;
      this.yaw = this.dragFrom.yaw + (e.clientX - this.dragFrom.x) * 0.01;
      this.pitch = Math.min(
        1.5,
        Math.max(-0.4, this.dragFrom.pitch + (e.clientY - this.dragFrom.y) * 0.01),
      );
      this.render();
    });
    canvas.addEventListener("pointerup", () => {
      this.dragFrom = null;
    });
    canvas.addEventListener(
      "wheel",
      (e) => {
        e.preventDefault();
        this.zoom = Math.min(8, Math.max(0.2, this.zoom * Math.exp(e.deltaY / 400)));
        this.render();
      },
      { passive: false },
    );
    new ResizeObserver(() => this.render()).observe(canvas);
  }

  private initGl(gl: WebGLRenderingContext): void {
    const compile = (type: number, src: string): WebGLShader => {
      const sh = gl.createShader(type)!;
      gl.shaderSource(sh, src);
      gl.compileShader(sh);
      if (!gl.getShaderParameter(sh, gl.COMPILE_STATUS)) {
        throw new Error(gl.getShaderInfoLog(sh) || "shader compile failed");
      }
      return sh;
    };
    const program = gl.createProgram()!;
    gl.attachShader(program, compile(gl.VERTEX_SHADER, VERT));
    gl.attachShader(program, compile(gl.FRAGMENT_SHADER, FRAG));
    gl.linkProgram(program);
    if (!gl.getProgramParameter(program, gl.LINK_STATUS)) {
      throw new Error(gl.getProgramInfoLog(program) || "link failed");
    }
    this.program = program;
    this.buffer = gl.createBuffer();
    gl.enable(gl.DEPTH_TEST);
  }

  /** Rebuild vertex buffers from a mesh payload (or clear with null). */
  setModel(model: ModelDoc | null): void {
    if (!this.gl || !this.buffer) return;
    if (model === null) {
      this.nVerts = 0;
      this.render();
      return;
    }
    // interleave [pos normal color], expanding triangles so each face
    // carries its own normal (flat shading)
    const data: number[] = [];
    let min = [Infinity, Infinity, Infinity];
    let max = [-Infinity, -Infinity, -Infinity];
    for (const solid of model.solids) {
      const color = MATERIAL_COLORS[solid.material] ?? FALLBACK_COLOR;
      const vs = solid.vertices;
      for (const [a, b, c] of solid.triangles) {
        const pa = vs[a];
        const pb = vs[b];
        const pc = vs[c];
        const ux = pb[0] - pa[0];
        const uy = pb[1] - pa[1];
        const uz = pb[2] - pa[2];
        const wx = pc[0] - pa[0];
        const wy = pc[1] - pa[1];
        const wz = pc[2] - pa[2];
        let nx = uy * wz - uz * wy;
        let ny = uz * wx - ux * wz;
        let nz = ux * wy - uy * wx;
        const l = Math.hypot(nx, ny, nz) || 1;
        nx /= l;
        ny /= l;
        nz /= l;
        for (const p of [pa, pb, pc]) {
          data.push(p[0], p[1], p[2], nx, ny, nz, color[0], color[1], color[2]);
          min = [Math.min(min[0], p[0]), Math.min(min[1], p[1]), Math.min(min[2], p[2])];
          max = [Math.max(max[0], p[0]), Math.max(max[1], p[1]), Math.max(max[2], p[2])];
        }
      }
    }
    this.nVerts = data.length / 9;
    if (this.nVerts > 0) {
      this.center = [(min[0] + max[0]) / 2, (min[1] + max[1]) / 2, (min[2] + max[2]) / 2];
      this.radius = Math.max(
        1,
        Math.hypot(max[0] - min[0], max[1] - min[1], max[2] - min[2]) / 2,
      );
    }
    const gl = this.gl;
    gl.bindBuffer(gl.ARRAY_BUFFER, this.buffer);
    gl.bufferData(gl.ARRAY_BUFFER, new Float32Array(data), gl.STATIC_DRAW);
    this.render();
  }

  render(): void {
    const gl = this.gl;
    if (!gl || !this.program) return;
    const dpr = window.devicePixelRatio || 1;
    const w = Math.max(1, Math.round(this.canvas.clientWidth * dpr));
    const h = Math.max(1, Math.round(this.canvas.clientHeight * dpr));
    if (this.canvas.width !== w || this.canvas.height !== h) {
      this.canvas.width = w;
      this.canvas.height = h;
    }
    gl.viewport(0, 0, w, h);
    gl.clearColor(0.97, 0.97, 0.95, 1);
    gl.clear(gl.COLOR_BUFFER_BIT | gl.DEPTH_BUFFER_BIT);
    if (this.nVerts === 0) return;

    const dist = this.radius * 2.4 * this.zoom;
    // model space is z-up; view with y-up screen convention
    const eye = [
      this.center[0] + dist * Math.cos(this.pitch) * Math.cos(this.yaw),
      this.center[1] + dist * Math.cos(this.pitch) * Math.sin(this.yaw),
      this.center[2] + dist * Math.sin(this.pitch),
    ];
    const view = lookAt(eye, this.center, [0, 0, 1]);
    const proj = perspective(Math.PI / 4, w / h, 0.05, dist * 10 + 50);
    const mvp = mat4Mul(proj, view);

    gl.useProgram(this.program);
    gl.bindBuffer(gl.ARRAY_BUFFER, this.buffer);
    const stride = 9 * 4;
    const attr = (name: string, size: number, offset: number) => {
      const loc = gl.getAttribLocation(this.program!, name);
      gl.enableVertexAttribArray(loc);
      gl.vertexAttribPointer(loc, size, gl.FLOAT, false, stride, offset);
    };
    attr("aPos", 3, 0);
    attr("aNormal", 3, 12);
    attr("aColor", 3, 24);
    gl.uniformMatrix4fv(gl.getUniformLocation(this.program, "uMvp"), false, mvp);
    const ll = Math.hypot(0.4, 0.25, 0.88);
    gl.uniform3f(
      gl.getUniformLocation(this.program, "uLight"),
      0.4 / ll,
      0.25 / ll,
      0.88 / ll,
    );
    gl.drawArrays(gl.TRIANGLES, 0, this.nVerts);
  }
}
