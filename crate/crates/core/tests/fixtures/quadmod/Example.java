public class A extends B implements C{//CI: B,C
    public D d = new D();//CA: D
    public C c = new D();//CA: C
    int var_A1 = d.var1_D;
    int var_A2 = D.var2_D_static;

    public A(D d1)//CM: D
    {
        d1.method_D();//MM: D
        D.method_D_static();//MM: D
    }

    public C Method_A(B b)//CM: B,C
    {
        D d2 = new D();
        d2.method_D();//MM: D
        return c;
    }

    public void method_C(B b) {}//CM: B
}

public class B {
    public void method_B(A a, D d) {}//CM: A,D
}

public interface C {
    public void method_C(B b);//CM: B
}

public class D implements C{//CI: C
    public int var1_D = 1;
    public static int var2_D_static = 2;

    public void method_D() {}

    public static void method_D_static() {}

    public void method_C(B b) {}//CM: B
}
